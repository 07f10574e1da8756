#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qst/protocol.hpp"

namespace qst {

// Trapezoidal rule on the periodic input-state angle theta in [0, 2*pi).
struct ThetaQuadrature {
    int node_count = 720;

    ThetaQuadrature() = default;
    explicit ThetaQuadrature(int nodes);
};

struct AxisDef {
    std::string name;
    std::vector<double> values;  // strictly increasing
};

// Rectangular sweep result, axis-major (axis1 is the slow index). A NaN value
// marks a grid point whose parameters were outside the computable domain.
struct FidelityGrid {
    AxisDef axis1;
    std::optional<AxisDef> axis2;
    std::vector<double> values;

    std::size_t rows() const { return axis1.values.size(); }
    std::size_t cols() const { return axis2 ? axis2->values.size() : 1; }
    double at(std::size_t i) const { return values.at(i); }
    double at(std::size_t i, std::size_t j) const { return values.at(i * cols() + j); }
    bool valid(std::size_t i) const;

    // Statistics over the finite entries.
    double max_value() const;
    double variance() const;
};

using StateMap = std::function<Ket(const InputState&)>;

// |<target|psi>|^2; with renormalize, divides by <psi|psi> (jump-conditioned
// fidelity instead of the no-jump convention).
double state_fidelity(const Ket& psi, const Ket& target, bool renormalize = false);

// Average of |<target(theta)|run(theta)>|^2 over the real great circle
// alpha = cos(theta/2), beta = sin(theta/2). phase_nodes > 1 additionally
// averages alpha over a relative-phase grid (optional secondary metric).
double average_fidelity(const StateMap& run, const TransferSpec& spec,
                        const ThetaQuadrature& quad = {}, int phase_nodes = 1,
                        bool renormalize = false);

// Wraps a schedule execution as a StateMap. The two basis trajectories are
// propagated once; the map is their linear combination, so evaluating it per
// quadrature node is cheap and exactly equals run_schedule on the same input.
StateMap schedule_state_map(const PulseSchedule& schedule, const TransferSpec& spec,
                            const DecayRate& decay, const Model& model = Model::secular());

// Fidelity surface over the two segment durations of the transfer sequence.
FidelityGrid sweep_times(const TransferSpec& spec, double gamma0, const DecayRate& decay,
                         const std::vector<double>& t1_grid,
                         const std::vector<double>& t2_grid,
                         const ThetaQuadrature& quad = {});

// Fidelity at the matched pulse time pi/Lambda(gamma) per spontaneous-emission
// rate. Overdamped entries are marked NaN.
FidelityGrid sweep_gamma(const TransferSpec& spec, double gamma0,
                         const std::vector<double>& gamma_grid,
                         const ThetaQuadrature& quad = {});

struct TimeErrorResult {
    std::vector<double> decay_values;
    std::vector<FidelityGrid> curves;   // one per decay value, over the offset axis
    std::vector<double> peak_offsets;   // argmax offset per curve, refined to 1e-6
};

// Fidelity against a shared duration offset applied to both segments, one
// curve per decay rate. Peaks are located by grid argmax plus golden-section
// refinement.
TimeErrorResult sweep_time_error(const TransferSpec& spec, double gamma0,
                                 const std::vector<double>& decay_list,
                                 const std::vector<double>& offset_grid,
                                 const ThetaQuadrature& quad = {});

// Largest sweep parallelism the engine may use: QST_THREADS when set,
// otherwise the hardware concurrency. Grid assembly stays deterministic.
int sweep_thread_cap();

}  // namespace qst
