#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qst/linalg.hpp"

namespace qst {

// Full8 basis helpers. Atom indices are 1..3; sigma_z|e> = +|e>, sigma_z|g> = -|g>.
inline int atom_bit(int atom) {
    return 1 << (3 - atom);
}
inline int excitation_count(int b) {
    return ((b >> 2) & 1) + ((b >> 1) & 1) + (b & 1);
}
inline double sigma_z(int b, int atom) {
    return (b & atom_bit(atom)) ? 1.0 : -1.0;
}
// Basis index of the state with only `atom` excited.
inline int single_excitation_index(int atom) {
    return atom_bit(atom);
}

// Per-atom Rabi frequencies of the local transverse drives, in units of Gamma_0.
struct RabiTriple {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;

    RabiTriple() = default;
    RabiTriple(double g1, double g2, double g3);
};

// Atomic spontaneous emission rate, in units of Gamma_0.
struct DecayRate {
    double gamma = 0.0;

    DecayRate() = default;
    explicit DecayRate(double g);
};

// Physical cavity/fiber parameters from which the ring coupling J is derived.
struct CavityParams {
    double kappa = 0.0;    // cavity leak rate (> 0)
    double g = 0.0;        // atom-cavity coupling (> 0)
    double delta = 0.0;    // detuning (!= 0)
    double epsilon = 0.0;  // external drive amplitude (>= 0)
    double phi = 0.0;      // fiber phase delay, [0, 2*pi)
    double nu = 0.0;       // fiber decay per meter (>= 0)
    double length = 0.0;   // fiber length in meters (>= 0)
};

// Derivation of J assumes Delta ~ kappa >> g; the window is checked as
// kappa/g >= min_kappa_over_g and |Delta/kappa - 1| <= max_delta_kappa_deviation.
struct ValidityThresholds {
    double min_kappa_over_g = 10.0;
    double max_delta_kappa_deviation = 0.5;
};

struct CouplingResult {
    double j = 0.0;
    double kappa_over_g = 0.0;
    double delta_over_kappa = 0.0;
    bool within_validity_window = false;
};

// J * (sz1*sz2 + sz2*sz3 + sz3*sz1): diagonal in the computational basis.
Operator build_hzz(double j);

// Sum of local transverse drives Gamma_i * sigma_x^i.
Operator build_hx(const RabiTriple& rabi);

// Rotating-frame average of the transverse drives on the ring: atom i flips
// with matrix element Gamma_i exactly when its two neighbors are anti-aligned.
// Dim 8, real symmetric, zero diagonal.
Operator build_secular(const RabiTriple& rabi);

// 3x3 restriction of the secular Hamiltonian to a driven pair subspace, in
// hub-first ordering: [[0, gb, ga], [gb, 0, 0], [ga, 0, 0]].
Operator build_subspace_h(double gamma_a, double gamma_b);

// Secular Hamiltonian plus the conditional (no-jump) decay term
// -i*gamma * sum_i |e><e|_i. Non-hermitian for gamma > 0.
Operator build_nonhermitian(const RabiTriple& rabi, const DecayRate& decay);

// The diagonal decay generator -i*gamma*(number of excited atoms) alone.
Matrix decay_diagonal(const DecayRate& decay);

// Ising coupling J from the cavity/fiber parameters. Fiber loss enters by
// replacing every factor e^{i*phi} with e^{i*phi - nu*L}.
CouplingResult compute_coupling(const CavityParams& params,
                                const ValidityThresholds& thresholds = {});

// J(nu, L) / J(nu = 0). Equals 1 at nu*L = 0.
double fiber_loss_ratio(const CavityParams& params);

// (L, ratio) samples on a uniform grid over [0, l_max].
std::vector<std::pair<double, double>> scan_fiber_length(const CavityParams& params,
                                                         double l_max, int points);

// First length at which the scanned loss ratio crosses `target`, refined by
// bisection; nullopt when no crossing exists within [0, l_max].
std::optional<double> find_loss_ratio_length(const CavityParams& params, double target,
                                             double l_max);

}  // namespace qst
