#pragma once

#include "qst/hamiltonians.hpp"
#include "qst/linalg.hpp"

namespace qst {

// Unknown qubit state alpha|e> + beta|g> to be transferred.
struct InputState {
    Complex alpha;
    Complex beta;

    // Requires |alpha|^2 + |beta|^2 = 1 within 1e-12.
    InputState(Complex a, Complex b);

    // Real Bloch great-circle parametrization (cos(theta/2), sin(theta/2)).
    static InputState from_theta(double theta);
};

// Amplitudes on one of the 3-dim driven subspaces.
struct SubspaceCoefficients {
    Complex c1;
    Complex c2;
    Complex c3;
    Basis basis = Basis::SubLossless;

    Ket to_ket() const;
};

// Diagonalization of the driven-pair Hamiltonian [[0,g2,g1],[g2,0,0],[g1,0,0]]:
// eigenvalues (+Omega, -Omega, 0) with Omega = sqrt(g1^2 + g2^2), and the
// orthogonal matrix whose rows are the eigenvectors in the subspace basis.
struct Eigensystem {
    Eigen::Vector3d eigenvalues;
    Eigen::Matrix3d s;
};

Eigensystem eigensystem(double gamma1, double gamma2);

// sqrt(gamma_a^2 + gamma_b^2 - gamma^2/4); throws OverdampedError when the
// argument is not positive.
double damped_frequency(double gamma_a, double gamma_b, double gamma);

// Coefficients at time t in the (|eeg>,|egg>,|geg>) subspace for the
// lossless drive on atoms 1 and 2, starting from (0, alpha, 0):
//   c1 = -i (alpha g2 / Omega) sin(Omega t)
//   c2 = alpha (g1^2 + g2^2 cos(Omega t)) / Omega^2
//   c3 = alpha g1 g2 (cos(Omega t) - 1) / Omega^2
SubspaceCoefficients coefficients_lossless(Complex alpha, double gamma1, double gamma2,
                                           double t);

// Coefficients at time t in the (|ege>,|egg>,|gge>) subspace for the drive on
// atoms 1 and 3 under conditional decay gamma, starting from (0, alpha, 0):
//   c1 = -i (alpha g3 / Lambda) e^{-3 gamma t / 2} sin(Lambda t)
//   c2 = (alpha / Om^2) e^{-gamma t} (g1^2 + g3^2 e^{-gamma t/2} u(t))
//   c3 = (alpha g1 g3 / Om^2) e^{-gamma t} (-1 + e^{-gamma t/2} u(t))
// with Om^2 = g1^2 + g3^2 and u(t) = cos(Lambda t) + (gamma / (2 Lambda)) sin(Lambda t).
// The sin-term coefficient gamma/(2 Lambda) is fixed by the numerical oracle.
SubspaceCoefficients coefficients_damped(Complex alpha, double gamma1, double gamma3,
                                         const DecayRate& decay, double t);

// Full-space (unnormalized) state after one pi pulse on atoms 1 and 3 of
// duration (2k-1)*pi/Lambda, starting from (alpha|e>+beta|g>)_1 |g>_2 |g>_3:
//   alpha A e^{-gamma t} |egg>  -  alpha B e^{-gamma t} |gge>  +  beta |ggg>
// with A = (1 - e^{-gamma t/2})/2 and B = (1 + e^{-gamma t/2})/2.
Ket one_step_state(const InputState& input, double gamma0, const DecayRate& decay, int k);

// Full-space (unnormalized) state after the two-step protocol
// (drive 1&3 for pi/Lambda, then drive 2&3 for pi/Lambda):
//   + alpha B1 B2 e^{-gamma (t1+t2)}   |geg>
//   - alpha B1 A2 e^{-gamma (t1+t2)}   |gge>
//   - alpha A1    e^{-gamma (t1+1.5 t2)} |egg>
//   + beta |ggg>
// The residual-term exponent 1.5*t2 is fixed by the numerical oracle.
Ket two_step_state(const InputState& input, double gamma0, const DecayRate& decay);

}  // namespace qst
