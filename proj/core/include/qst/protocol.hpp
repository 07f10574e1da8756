#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qst/analytic.hpp"
#include "qst/hamiltonians.hpp"
#include "qst/linalg.hpp"

namespace qst {

struct PulseSegment {
    RabiTriple rabi;
    double duration = 0.0;  // units of 1/Gamma_0

    PulseSegment() = default;
    PulseSegment(RabiTriple r, double d);
};

struct PulseSchedule {
    std::vector<PulseSegment> segments;

    double total_duration() const;
};

// Which atom holds the input state, which receives it, and which mediates.
struct TransferSpec {
    int source = 1;
    int target = 2;
    int auxiliary = 3;

    TransferSpec(int source_atom, int target_atom);
    TransferSpec(int source_atom, int target_atom, int auxiliary_atom);
};

// Propagation model for schedule execution. The secular model drives the
// averaged flip Hamiltonian directly; the full-effective model evolves under
// the ring coupling plus transverse drives and reports the state in the
// rotating frame of the ring coupling, so both are directly comparable.
struct Model {
    enum class Kind { secular, full_effective };

    Kind kind = Kind::secular;
    double coupling_j = 0.0;

    static Model secular() { return {}; }
    static Model full_effective(double j) { return {Kind::full_effective, j}; }
};

// The two-step transfer sequence: drive source+auxiliary for (2*k1-1)*pi/Lambda,
// then target+auxiliary for (2*k2-1)*pi/Lambda, all at Rabi frequency gamma0.
PulseSchedule standard_schedule(const TransferSpec& spec, double gamma0,
                                const DecayRate& decay, int k1 = 1, int k2 = 1);

// (alpha|e> + beta|g>)_source with the other two atoms in |g>.
Ket initial_state(const InputState& input, const TransferSpec& spec);

// (alpha|e> + beta|g>)_target with the other two atoms in |g>.
Ket target_state(const InputState& input, const TransferSpec& spec);

// Execute a schedule from the protocol's initial state. The returned state is
// unnormalized when decay is active (no-jump convention).
Ket run_schedule(const PulseSchedule& schedule, const InputState& input,
                 const TransferSpec& spec, const DecayRate& decay,
                 const Model& model = Model::secular());

// Thread an existing Full8 state through a schedule. start_time anchors the
// rotating-frame clock of the full-effective model; consecutive calls compose
// exactly when the second call passes the first call's end time. The secular
// model ignores it.
Ket run_schedule_from(const PulseSchedule& schedule, const Ket& psi, const DecayRate& decay,
                      const Model& model = Model::secular(), double start_time = 0.0);

// Standard schedule with both segment durations offset by delta_t.
Ket run_with_time_error(const TransferSpec& spec, const InputState& input, double gamma0,
                        const DecayRate& decay, double delta_t);

// Per-segment offsets.
Ket run_with_time_error(const TransferSpec& spec, const InputState& input, double gamma0,
                        const DecayRate& decay, double delta_t1, double delta_t2);

// Plain-text schedule format: one "G1 G2 G3 DURATION" line per segment,
// '#' starts a comment.
std::string format_schedule(const PulseSchedule& schedule);
PulseSchedule parse_schedule(std::string_view text);

}  // namespace qst
