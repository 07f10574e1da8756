#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qst/errors.hpp"

namespace qst {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Basis labels for state vectors.
//
// Full8:       computational basis of the three atoms, index b = 4*n1 + 2*n2 + n3
//              with n_i = 1 for |e> (so |ggg> = 0, |gge> = 1, ..., |eee> = 7).
// SubLossless: (|eeg>, |egg>, |geg>), the invariant subspace driven while atom 3
//              is idle (Gamma_3 = 0).
// SubDamped:   (|ege>, |egg>, |gge>), the invariant subspace driven while atom 2
//              is idle (Gamma_2 = 0).
enum class Basis { Full8, SubLossless, SubDamped };

int basis_dim(Basis basis);

struct Ket {
    Basis basis = Basis::Full8;
    Vector amplitudes;

    Ket() = default;
    // Checks the amplitude count against the basis label and rejects
    // non-finite entries.
    Ket(Basis basis_label, Vector amp);

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double squared_norm() const { return amplitudes.squaredNorm(); }
};

// Dense square operator with an explicit hermiticity flag. expm_apply trusts
// the flag when selecting the propagation method, so the constructor verifies
// it: max entrywise |H - H^dagger| must stay below 1e-12.
struct Operator {
    Matrix entries;
    bool hermitian = false;

    Operator() = default;
    Operator(Matrix m, bool hermitian_flag);

    int dim() const { return static_cast<int>(entries.rows()); }
};

// e^{-iHt} |psi>. Hermitian operators go through an eigendecomposition;
// everything else through scaling-and-squaring with the series truncated at
// relative tolerance 1e-12. t = 0 returns psi unchanged.
Ket expm_apply(const Operator& h, const Ket& psi, double t);

// Classic fixed-step fourth-order integration of i d/dt psi = H psi.
// Algorithmically independent of expm_apply; this is the brute-force oracle
// every closed-form result is checked against.
Ket rk4_propagate(const Operator& h, const Ket& psi, double t, int steps);

// Overload using rk4_default_steps.
Ket rk4_propagate(const Operator& h, const Ket& psi, double t);

// Step count such that the step size h satisfies
// h <= min(1e-3, t/2000) / max_ij |H_ij|.
int rk4_default_steps(const Operator& h, double t);

void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace qst
