#include "qst/linalg.hpp"

#include <cmath>
#include <string>

namespace qst {

namespace {

double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

// Row-sum (infinity) norm, used to pick the scaling exponent.
double inf_norm(const Matrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// exp(A) by scaling-and-squaring with a truncated Taylor series.
Matrix expm_dense(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    const double norm = inf_norm(a);

    int squarings = 0;
    if (norm > 1.0) {
        squarings = static_cast<int>(std::ceil(std::log2(norm)));
    }
    const Matrix b = a / std::ldexp(1.0, squarings);

    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    bool converged = false;
    for (int k = 1; k <= 128; ++k) {
        term = (term * b) / static_cast<double>(k);
        result += term;
        if (inf_norm(term) <= 1e-12 * inf_norm(result)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw Error("expm: series failed to converge");
    }

    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

}  // namespace

int basis_dim(Basis basis) {
    return basis == Basis::Full8 ? 8 : 3;
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entries");
    }
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entries");
    }
}

Ket::Ket(Basis basis_label, Vector amp) : basis(basis_label), amplitudes(std::move(amp)) {
    if (dim() != basis_dim(basis)) {
        throw ContractError("Ket: amplitude count does not match basis dimension");
    }
    require_finite(amplitudes, "Ket");
}

Operator::Operator(Matrix m, bool hermitian_flag) : entries(std::move(m)), hermitian(hermitian_flag) {
    if (entries.rows() != entries.cols()) {
        throw ContractError("Operator: matrix must be square");
    }
    require_finite(entries, "Operator");
    if (hermitian && max_abs(entries - entries.adjoint()) >= 1e-12) {
        throw ContractError("Operator: hermitian flag set on a non-hermitian matrix");
    }
}

Ket expm_apply(const Operator& h, const Ket& psi, double t) {
    if (h.dim() != psi.dim()) {
        throw ContractError("expm_apply: operator/state dimension mismatch");
    }
    if (!(t >= 0.0)) {
        throw ContractError("expm_apply: duration must be >= 0");
    }
    require_finite(h.entries, "expm_apply");
    require_finite(psi.amplitudes, "expm_apply");
    if (t == 0.0) {
        return psi;
    }

    if (h.hermitian) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.entries);
        Vector coeffs = es.eigenvectors().adjoint() * psi.amplitudes;
        for (int i = 0; i < coeffs.size(); ++i) {
            coeffs[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
        }
        return Ket(psi.basis, es.eigenvectors() * coeffs);
    }

    const Matrix u = expm_dense(Complex(0.0, -t) * h.entries);
    return Ket(psi.basis, u * psi.amplitudes);
}

Ket rk4_propagate(const Operator& h, const Ket& psi, double t, int steps) {
    if (h.dim() != psi.dim()) {
        throw ContractError("rk4_propagate: operator/state dimension mismatch");
    }
    if (!(t >= 0.0)) {
        throw ContractError("rk4_propagate: duration must be >= 0");
    }
    if (steps < 1) {
        throw InputError("rk4_propagate: steps must be >= 1");
    }
    require_finite(h.entries, "rk4_propagate");
    require_finite(psi.amplitudes, "rk4_propagate");

    const Matrix& m = h.entries;
    const Complex minus_i(0.0, -1.0);
    const double dt = t / steps;

    Vector y = psi.amplitudes;
    Vector k1, k2, k3, k4;
    for (int s = 0; s < steps; ++s) {
        k1 = minus_i * (m * y);
        k2 = minus_i * (m * (y + (0.5 * dt) * k1));
        k3 = minus_i * (m * (y + (0.5 * dt) * k2));
        k4 = minus_i * (m * (y + dt * k3));
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return Ket(psi.basis, std::move(y));
}

int rk4_default_steps(const Operator& h, double t) {
    if (t <= 0.0) {
        return 1;
    }
    const double mx = max_abs(h.entries);
    if (mx == 0.0) {
        return 1;
    }
    const double h_bound = std::min(1e-3, t / 2000.0) / mx;
    const double steps = std::ceil(t / h_bound);
    if (steps > 2e8) {
        throw InputError("rk4_default_steps: required step count is impractically large");
    }
    return std::max(1, static_cast<int>(steps));
}

Ket rk4_propagate(const Operator& h, const Ket& psi, double t) {
    return rk4_propagate(h, psi, t, rk4_default_steps(h, t));
}

}  // namespace qst
