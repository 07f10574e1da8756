#include "qst/hamiltonians.hpp"

#include <cmath>
#include <string>

namespace qst {

namespace {

constexpr int kDim = 8;

// Ring neighbors of each atom (1-based).
constexpr int kNeighbors[4][2] = {{0, 0}, {2, 3}, {3, 1}, {1, 2}};

void require_finite_value(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InputError(std::string(what) + ": non-finite value");
    }
}

void validate_cavity_params(const CavityParams& p) {
    for (double v : {p.kappa, p.g, p.delta, p.epsilon, p.phi, p.nu, p.length}) {
        require_finite_value(v, "CavityParams");
    }
    if (p.kappa <= 0.0) {
        throw InputError("CavityParams: kappa must be > 0");
    }
    if (p.g <= 0.0) {
        throw InputError("CavityParams: g must be > 0");
    }
    if (p.delta == 0.0) {
        throw InputError("CavityParams: delta must be nonzero");
    }
    if (p.epsilon < 0.0 || p.nu < 0.0 || p.length < 0.0) {
        throw InputError("CavityParams: epsilon, nu and length must be >= 0");
    }
}

}  // namespace

RabiTriple::RabiTriple(double g1, double g2, double g3) : gamma1(g1), gamma2(g2), gamma3(g3) {
    for (double v : {g1, g2, g3}) {
        require_finite_value(v, "RabiTriple");
        if (v < 0.0) {
            throw InputError("RabiTriple: Rabi frequencies must be >= 0");
        }
    }
}

DecayRate::DecayRate(double g) : gamma(g) {
    require_finite_value(g, "DecayRate");
    if (g < 0.0) {
        throw InputError("DecayRate: gamma must be >= 0");
    }
}

Operator build_hzz(double j) {
    require_finite_value(j, "build_hzz");
    Matrix m = Matrix::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        const double s1 = sigma_z(b, 1);
        const double s2 = sigma_z(b, 2);
        const double s3 = sigma_z(b, 3);
        m(b, b) = j * (s1 * s2 + s2 * s3 + s3 * s1);
    }
    return Operator(std::move(m), true);
}

Operator build_hx(const RabiTriple& rabi) {
    const double g[4] = {0.0, rabi.gamma1, rabi.gamma2, rabi.gamma3};
    Matrix m = Matrix::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        for (int atom = 1; atom <= 3; ++atom) {
            m(b ^ atom_bit(atom), b) += g[atom];
        }
    }
    return Operator(std::move(m), true);
}

Operator build_secular(const RabiTriple& rabi) {
    const double g[4] = {0.0, rabi.gamma1, rabi.gamma2, rabi.gamma3};
    Matrix m = Matrix::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        for (int atom = 1; atom <= 3; ++atom) {
            const int j = kNeighbors[atom][0];
            const int k = kNeighbors[atom][1];
            // (Gamma_i/2)(1 - sz_j sz_k) is Gamma_i for anti-aligned
            // neighbors and 0 otherwise.
            if (sigma_z(b, j) * sigma_z(b, k) < 0.0) {
                m(b ^ atom_bit(atom), b) += g[atom];
            }
        }
    }
    return Operator(std::move(m), true);
}

Operator build_subspace_h(double gamma_a, double gamma_b) {
    require_finite_value(gamma_a, "build_subspace_h");
    require_finite_value(gamma_b, "build_subspace_h");
    if (gamma_a < 0.0 || gamma_b < 0.0) {
        throw InputError("build_subspace_h: Rabi frequencies must be >= 0");
    }
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = gamma_b;
    m(1, 0) = gamma_b;
    m(0, 2) = gamma_a;
    m(2, 0) = gamma_a;
    return Operator(std::move(m), true);
}

Matrix decay_diagonal(const DecayRate& decay) {
    Matrix m = Matrix::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        m(b, b) = Complex(0.0, -decay.gamma * excitation_count(b));
    }
    return m;
}

Operator build_nonhermitian(const RabiTriple& rabi, const DecayRate& decay) {
    Matrix m = build_secular(rabi).entries + decay_diagonal(decay);
    return Operator(std::move(m), decay.gamma == 0.0);
}

CouplingResult compute_coupling(const CavityParams& p, const ValidityThresholds& thresholds) {
    validate_cavity_params(p);

    // M = i*Delta + kappa; every e^{i*phi} carries the fiber attenuation
    // e^{-nu*L}, including the ones inside W and the intracavity amplitude.
    const Complex m(p.kappa, p.delta);
    const Complex phase = std::exp(Complex(-p.nu * p.length, p.phi));
    const Complex w = p.kappa * phase;
    const Complex denom = m * m * m - w * w * w;
    if (std::abs(denom) < 1e-12 * p.kappa * p.kappa * p.kappa) {
        throw SingularParameterError("compute_coupling: M^3 - W^3 is numerically singular");
    }

    const Complex alpha_cav = p.epsilon * (m * m + m * w + w * w) / denom;
    const double chi = p.g * p.g / p.delta;
    const Complex factor = std::norm(alpha_cav) * phase * (m + w) / denom;

    CouplingResult result;
    result.j = 2.0 * p.kappa * chi * chi * std::imag(factor);
    result.kappa_over_g = p.kappa / p.g;
    result.delta_over_kappa = p.delta / p.kappa;
    result.within_validity_window =
        result.kappa_over_g >= thresholds.min_kappa_over_g &&
        std::abs(result.delta_over_kappa - 1.0) <= thresholds.max_delta_kappa_deviation;
    return result;
}

double fiber_loss_ratio(const CavityParams& params) {
    CavityParams lossless = params;
    lossless.nu = 0.0;
    const double j0 = compute_coupling(lossless).j;
    if (std::abs(j0) < 1e-300) {
        throw SingularParameterError("fiber_loss_ratio: J(nu=0) vanishes, ratio undefined");
    }
    return compute_coupling(params).j / j0;
}

std::vector<std::pair<double, double>> scan_fiber_length(const CavityParams& params,
                                                         double l_max, int points) {
    require_finite_value(l_max, "scan_fiber_length");
    if (l_max < 0.0 || points < 2) {
        throw InputError("scan_fiber_length: need l_max >= 0 and at least 2 points");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(points);
    CavityParams p = params;
    for (int i = 0; i < points; ++i) {
        p.length = l_max * i / (points - 1);
        out.emplace_back(p.length, fiber_loss_ratio(p));
    }
    return out;
}

std::optional<double> find_loss_ratio_length(const CavityParams& params, double target,
                                             double l_max) {
    const auto samples = scan_fiber_length(params, l_max, 513);
    CavityParams p = params;
    auto ratio_at = [&p](double l) mutable {
        p.length = l;
        return fiber_loss_ratio(p);
    };
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double fa = samples[i].second - target;
        const double fb = samples[i + 1].second - target;
        if (fa == 0.0) {
            return samples[i].first;
        }
        if (fa * fb < 0.0) {
            double a = samples[i].first;
            double b = samples[i + 1].first;
            double va = fa;
            for (int iter = 0; iter < 200 && b - a > 1e-12 * std::max(1.0, b); ++iter) {
                const double mid = 0.5 * (a + b);
                const double vm = ratio_at(mid) - target;
                if (va * vm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    va = vm;
                }
            }
            return 0.5 * (a + b);
        }
    }
    return std::nullopt;
}

}  // namespace qst
