#include "qst/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace qst {

namespace {

RabiTriple rabi_for_atoms(int a, int b, double gamma0) {
    double g[4] = {0.0, 0.0, 0.0, 0.0};
    g[a] = gamma0;
    g[b] = gamma0;
    return RabiTriple(g[1], g[2], g[3]);
}

Operator segment_hamiltonian(const PulseSegment& seg, const DecayRate& decay,
                             const Model& model) {
    switch (model.kind) {
        case Model::Kind::secular:
            return build_nonhermitian(seg.rabi, decay);
        case Model::Kind::full_effective: {
            Matrix m = build_hzz(model.coupling_j).entries + build_hx(seg.rabi).entries +
                       decay_diagonal(decay);
            return Operator(std::move(m), decay.gamma == 0.0);
        }
    }
    throw InputError("run_schedule: unknown model variant");
}

// Phase rotation e^{+i*s*H_zz*t} applied entrywise (H_zz is diagonal).
void apply_ring_frame(Vector& amp, double j, double t, double sign) {
    if (t == 0.0 || j == 0.0) {
        return;
    }
    for (int b = 0; b < 8; ++b) {
        const double s1 = sigma_z(b, 1);
        const double s2 = sigma_z(b, 2);
        const double s3 = sigma_z(b, 3);
        const double energy = j * (s1 * s2 + s2 * s3 + s3 * s1);
        amp[b] *= std::exp(Complex(0.0, sign * energy * t));
    }
}

}  // namespace

PulseSegment::PulseSegment(RabiTriple r, double d) : rabi(r), duration(d) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
        throw InputError("PulseSegment: duration must be finite and >= 0");
    }
}

double PulseSchedule::total_duration() const {
    double total = 0.0;
    for (const auto& seg : segments) {
        total += seg.duration;
    }
    return total;
}

TransferSpec::TransferSpec(int source_atom, int target_atom)
    : TransferSpec(source_atom, target_atom, 6 - source_atom - target_atom) {}

TransferSpec::TransferSpec(int source_atom, int target_atom, int auxiliary_atom)
    : source(source_atom), target(target_atom), auxiliary(auxiliary_atom) {
    const int all = atom_bit(1) | atom_bit(2) | atom_bit(3);
    if (source < 1 || source > 3 || target < 1 || target > 3 || auxiliary < 1 ||
        auxiliary > 3 ||
        (atom_bit(source) | atom_bit(target) | atom_bit(auxiliary)) != all) {
        throw InputError("TransferSpec: atoms must be a permutation of {1,2,3}");
    }
}

PulseSchedule standard_schedule(const TransferSpec& spec, double gamma0,
                                const DecayRate& decay, int k1, int k2) {
    if (!(gamma0 > 0.0)) {
        throw InputError("standard_schedule: gamma0 must be > 0");
    }
    if (k1 < 1 || k2 < 1) {
        throw InputError("standard_schedule: k must be >= 1");
    }
    const double lambda = damped_frequency(gamma0, gamma0, decay.gamma);
    const double pi = std::numbers::pi;

    PulseSchedule schedule;
    schedule.segments.emplace_back(rabi_for_atoms(spec.source, spec.auxiliary, gamma0),
                                   (2 * k1 - 1) * pi / lambda);
    schedule.segments.emplace_back(rabi_for_atoms(spec.target, spec.auxiliary, gamma0),
                                   (2 * k2 - 1) * pi / lambda);
    return schedule;
}

Ket initial_state(const InputState& input, const TransferSpec& spec) {
    Vector amp = Vector::Zero(8);
    amp[single_excitation_index(spec.source)] = input.alpha;
    amp[0] = input.beta;
    return Ket(Basis::Full8, std::move(amp));
}

Ket target_state(const InputState& input, const TransferSpec& spec) {
    Vector amp = Vector::Zero(8);
    amp[single_excitation_index(spec.target)] = input.alpha;
    amp[0] = input.beta;
    return Ket(Basis::Full8, std::move(amp));
}

Ket run_schedule_from(const PulseSchedule& schedule, const Ket& psi, const DecayRate& decay,
                      const Model& model, double start_time) {
    if (schedule.segments.empty()) {
        throw InputError("run_schedule: schedule must contain at least one segment");
    }
    if (psi.basis != Basis::Full8) {
        throw ContractError("run_schedule: expected a Full8 state");
    }

    const bool rotating_frame = model.kind == Model::Kind::full_effective;
    Ket state = psi;
    if (rotating_frame) {
        apply_ring_frame(state.amplitudes, model.coupling_j, start_time, -1.0);
    }

    const double input_norm = psi.squared_norm();
    double clock = start_time;
    for (const auto& seg : schedule.segments) {
        state = expm_apply(segment_hamiltonian(seg, decay, model), state, seg.duration);
        clock += seg.duration;
    }

    if (rotating_frame) {
        apply_ring_frame(state.amplitudes, model.coupling_j, clock, 1.0);
    }
    // Both generators are norm-contracting, so growth signals numerical trouble.
    if (state.squared_norm() > input_norm + 1e-9) {
        throw Error("run_schedule: state norm grew beyond tolerance");
    }
    return state;
}

Ket run_schedule(const PulseSchedule& schedule, const InputState& input,
                 const TransferSpec& spec, const DecayRate& decay, const Model& model) {
    return run_schedule_from(schedule, initial_state(input, spec), decay, model, 0.0);
}

Ket run_with_time_error(const TransferSpec& spec, const InputState& input, double gamma0,
                        const DecayRate& decay, double delta_t1, double delta_t2) {
    PulseSchedule schedule = standard_schedule(spec, gamma0, decay);
    for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
        const double offset = i == 0 ? delta_t1 : delta_t2;
        const double duration = schedule.segments[i].duration + offset;
        if (duration < 0.0) {
            throw InputError("run_with_time_error: offset makes a duration negative");
        }
        schedule.segments[i].duration = duration;
    }
    return run_schedule(schedule, input, spec, decay);
}

Ket run_with_time_error(const TransferSpec& spec, const InputState& input, double gamma0,
                        const DecayRate& decay, double delta_t) {
    return run_with_time_error(spec, input, gamma0, decay, delta_t, delta_t);
}

std::string format_schedule(const PulseSchedule& schedule) {
    std::string out = "# G1 G2 G3 DURATION\n";
    char line[128];
    for (const auto& seg : schedule.segments) {
        std::snprintf(line, sizeof(line), "%.17g %.17g %.17g %.17g\n", seg.rabi.gamma1,
                      seg.rabi.gamma2, seg.rabi.gamma3, seg.duration);
        out += line;
    }
    return out;
}

PulseSchedule parse_schedule(std::string_view text) {
    PulseSchedule schedule;
    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        double g1, g2, g3, duration;
        if (!(fields >> g1)) {
            continue;  // blank or comment-only line
        }
        if (!(fields >> g2 >> g3 >> duration)) {
            throw InputError("parse_schedule: line " + std::to_string(line_no) +
                             ": expected \"G1 G2 G3 DURATION\"");
        }
        std::string extra;
        if (fields >> extra) {
            throw InputError("parse_schedule: line " + std::to_string(line_no) +
                             ": trailing fields");
        }
        schedule.segments.emplace_back(RabiTriple(g1, g2, g3), duration);
    }
    if (schedule.segments.empty()) {
        throw InputError("parse_schedule: no segments found");
    }
    return schedule;
}

}  // namespace qst
