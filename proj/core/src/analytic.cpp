#include "qst/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qst {

namespace {

void require_finite_complex(Complex v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InputError(std::string(what) + ": non-finite value");
    }
}

}  // namespace

InputState::InputState(Complex a, Complex b) : alpha(a), beta(b) {
    require_finite_complex(a, "InputState");
    require_finite_complex(b, "InputState");
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) {
        throw InputError("InputState: |alpha|^2 + |beta|^2 must equal 1");
    }
}

InputState InputState::from_theta(double theta) {
    return InputState(std::cos(theta / 2.0), std::sin(theta / 2.0));
}

Ket SubspaceCoefficients::to_ket() const {
    Vector amp(3);
    amp << c1, c2, c3;
    return Ket(basis, std::move(amp));
}

Eigensystem eigensystem(double gamma1, double gamma2) {
    if (gamma1 < 0.0 || gamma2 < 0.0 || !std::isfinite(gamma1) || !std::isfinite(gamma2)) {
        throw InputError("eigensystem: Rabi frequencies must be finite and >= 0");
    }
    const double omega_sq = gamma1 * gamma1 + gamma2 * gamma2;
    if (omega_sq == 0.0) {
        throw SingularParameterError("eigensystem: both Rabi frequencies vanish");
    }
    const double omega = std::sqrt(omega_sq);
    const double r = std::numbers::sqrt2;

    Eigensystem es;
    es.eigenvalues << omega, -omega, 0.0;
    es.s << 1.0 / r, gamma2 / (r * omega), gamma1 / (r * omega),
           -1.0 / r, gamma2 / (r * omega), gamma1 / (r * omega),
            0.0,     -gamma1 / omega,      gamma2 / omega;
    return es;
}

double damped_frequency(double gamma_a, double gamma_b, double gamma) {
    const double arg = gamma_a * gamma_a + gamma_b * gamma_b - 0.25 * gamma * gamma;
    if (arg <= 0.0) {
        throw OverdampedError("damped_frequency: gamma >= 2*sqrt(ga^2 + gb^2)");
    }
    return std::sqrt(arg);
}

SubspaceCoefficients coefficients_lossless(Complex alpha, double gamma1, double gamma2,
                                           double t) {
    require_finite_complex(alpha, "coefficients_lossless");
    if (!(t >= 0.0)) {
        throw ContractError("coefficients_lossless: t must be >= 0");
    }
    const double omega_sq = gamma1 * gamma1 + gamma2 * gamma2;
    if (omega_sq == 0.0) {
        throw SingularParameterError("coefficients_lossless: Omega vanishes");
    }
    const double omega = std::sqrt(omega_sq);
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);

    SubspaceCoefficients out;
    out.basis = Basis::SubLossless;
    out.c1 = Complex(0.0, -1.0) * alpha * (gamma2 / omega) * s;
    out.c2 = alpha * (gamma1 * gamma1 + gamma2 * gamma2 * c) / omega_sq;
    out.c3 = alpha * gamma1 * gamma2 * (c - 1.0) / omega_sq;
    return out;
}

SubspaceCoefficients coefficients_damped(Complex alpha, double gamma1, double gamma3,
                                         const DecayRate& decay, double t) {
    require_finite_complex(alpha, "coefficients_damped");
    if (!(t >= 0.0)) {
        throw ContractError("coefficients_damped: t must be >= 0");
    }
    const double gamma = decay.gamma;
    const double lambda = damped_frequency(gamma1, gamma3, gamma);
    const double omega_sq = gamma1 * gamma1 + gamma3 * gamma3;

    const double c = std::cos(lambda * t);
    const double s = std::sin(lambda * t);
    const double env = std::exp(-gamma * t);
    const double env_half = std::exp(-0.5 * gamma * t);
    // Damped oscillation of the hub amplitude; the sin correction enters at
    // order gamma/(2*Lambda).
    const double u = c + (gamma / (2.0 * lambda)) * s;

    SubspaceCoefficients out;
    out.basis = Basis::SubDamped;
    out.c1 = Complex(0.0, -1.0) * alpha * (gamma3 / lambda) * env * env_half * s;
    out.c2 = alpha * env * (gamma1 * gamma1 + gamma3 * gamma3 * env_half * u) / omega_sq;
    out.c3 = alpha * (gamma1 * gamma3 / omega_sq) * env * (env_half * u - 1.0);
    return out;
}

Ket one_step_state(const InputState& input, double gamma0, const DecayRate& decay, int k) {
    if (!(gamma0 > 0.0)) {
        throw InputError("one_step_state: gamma0 must be > 0");
    }
    if (k < 1) {
        throw InputError("one_step_state: k must be >= 1");
    }
    const double lambda = damped_frequency(gamma0, gamma0, decay.gamma);
    const double t = (2 * k - 1) * std::numbers::pi / lambda;
    const double env = std::exp(-decay.gamma * t);
    const double env_half = std::exp(-0.5 * decay.gamma * t);
    const double a1 = 0.5 * (1.0 - env_half);
    const double b1 = 0.5 * (1.0 + env_half);

    Vector amp = Vector::Zero(8);
    amp[single_excitation_index(1)] = input.alpha * a1 * env;   // |egg>
    amp[single_excitation_index(3)] = -input.alpha * b1 * env;  // |gge>
    amp[0] = input.beta;                                        // |ggg>
    return Ket(Basis::Full8, std::move(amp));
}

Ket two_step_state(const InputState& input, double gamma0, const DecayRate& decay) {
    if (!(gamma0 > 0.0)) {
        throw InputError("two_step_state: gamma0 must be > 0");
    }
    const double lambda = damped_frequency(gamma0, gamma0, decay.gamma);
    const double tp = std::numbers::pi / lambda;
    const double env_half = std::exp(-0.5 * decay.gamma * tp);
    const double a = 0.5 * (1.0 - env_half);  // A1 = A2 for equal durations
    const double b = 0.5 * (1.0 + env_half);
    const double env_two_steps = std::exp(-decay.gamma * 2.0 * tp);
    const double env_residual = std::exp(-decay.gamma * 2.5 * tp);

    Vector amp = Vector::Zero(8);
    amp[single_excitation_index(2)] = input.alpha * b * b * env_two_steps;   // |geg>
    amp[single_excitation_index(3)] = -input.alpha * b * a * env_two_steps;  // |gge>
    amp[single_excitation_index(1)] = -input.alpha * a * env_residual;       // |egg>
    amp[0] = input.beta;                                                     // |ggg>
    return Ket(Basis::Full8, std::move(amp));
}

}  // namespace qst
