#include "qst/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace qst {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate_axis(const std::vector<double>& values, const char* name) {
    if (values.empty()) {
        throw InputError(std::string(name) + ": grid must be non-empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InputError(std::string(name) + ": non-finite grid value");
        }
        if (i > 0 && values[i] <= values[i - 1]) {
            throw InputError(std::string(name) + ": grid must be strictly increasing");
        }
    }
}

void check_fidelity_range(double f) {
    if (std::isnan(f)) {
        return;
    }
    if (f < -1e-9 || f > 1.0 + 1e-9) {
        throw Error("fidelity outside [0, 1 + 1e-9]");
    }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int cap = sweep_thread_cap();
    const std::size_t workers = std::min<std::size_t>(std::max(cap, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

PulseSchedule schedule_with_durations(const TransferSpec& spec, double gamma0,
                                      const DecayRate& decay, double t1, double t2) {
    PulseSchedule schedule = standard_schedule(spec, gamma0, decay);
    schedule.segments[0].duration = t1;
    schedule.segments[1].duration = t2;
    return schedule;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    const double invphi = std::numbers::phi - 1.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ThetaQuadrature::ThetaQuadrature(int nodes) : node_count(nodes) {
    if (nodes < 8) {
        throw InputError("ThetaQuadrature: node_count must be >= 8");
    }
}

bool FidelityGrid::valid(std::size_t i) const {
    return !std::isnan(values.at(i));
}

double FidelityGrid::max_value() const {
    double best = kNan;
    for (double v : values) {
        if (!std::isnan(v) && (std::isnan(best) || v > best)) {
            best = v;
        }
    }
    return best;
}

double FidelityGrid::variance() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    }
    if (n == 0) {
        return kNan;
    }
    const double mean = sum / n;
    double acc = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) {
            acc += (v - mean) * (v - mean);
        }
    }
    return acc / n;
}

double state_fidelity(const Ket& psi, const Ket& target, bool renormalize) {
    if (psi.dim() != target.dim()) {
        throw ContractError("state_fidelity: dimension mismatch");
    }
    const Complex overlap = (target.amplitudes.adjoint() * psi.amplitudes)(0);
    double f = std::norm(overlap);
    if (renormalize) {
        const double nrm = psi.squared_norm();
        if (nrm <= 0.0) {
            throw SingularParameterError("state_fidelity: cannot renormalize a null state");
        }
        f /= nrm;
    }
    if (!std::isfinite(f)) {
        throw Error("state_fidelity: non-finite result");
    }
    return f;
}

double average_fidelity(const StateMap& run, const TransferSpec& spec,
                        const ThetaQuadrature& quad, int phase_nodes, bool renormalize) {
    if (!run) {
        throw InputError("average_fidelity: empty state map");
    }
    if (phase_nodes < 1) {
        throw InputError("average_fidelity: phase_nodes must be >= 1");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    double sum = 0.0;
    for (int p = 0; p < phase_nodes; ++p) {
        const Complex phase = std::exp(Complex(0.0, two_pi * p / phase_nodes));
        for (int j = 0; j < quad.node_count; ++j) {
            const double theta = two_pi * j / quad.node_count;
            const InputState in(phase * std::cos(theta / 2.0), std::sin(theta / 2.0));
            sum += state_fidelity(run(in), target_state(in, spec), renormalize);
        }
    }
    const double f = sum / (static_cast<double>(quad.node_count) * phase_nodes);
    check_fidelity_range(f);
    return f;
}

StateMap schedule_state_map(const PulseSchedule& schedule, const TransferSpec& spec,
                            const DecayRate& decay, const Model& model) {
    // The evolution is linear, so the two basis trajectories determine the
    // final state of every input exactly.
    const Ket excited = run_schedule(schedule, InputState(1.0, 0.0), spec, decay, model);
    const Ket ground = run_schedule(schedule, InputState(0.0, 1.0), spec, decay, model);
    return [excited, ground](const InputState& in) {
        return Ket(Basis::Full8,
                   in.alpha * excited.amplitudes + in.beta * ground.amplitudes);
    };
}

FidelityGrid sweep_times(const TransferSpec& spec, double gamma0, const DecayRate& decay,
                         const std::vector<double>& t1_grid,
                         const std::vector<double>& t2_grid, const ThetaQuadrature& quad) {
    validate_axis(t1_grid, "sweep_times: t1");
    validate_axis(t2_grid, "sweep_times: t2");
    if (t1_grid.front() < 0.0 || t2_grid.front() < 0.0) {
        throw InputError("sweep_times: durations must be >= 0");
    }

    FidelityGrid grid;
    grid.axis1 = {"t1", t1_grid};
    grid.axis2 = AxisDef{"t2", t2_grid};
    grid.values.assign(t1_grid.size() * t2_grid.size(), 0.0);

    parallel_for(grid.values.size(), [&](std::size_t idx) {
        const double t1 = t1_grid[idx / t2_grid.size()];
        const double t2 = t2_grid[idx % t2_grid.size()];
        const auto schedule = schedule_with_durations(spec, gamma0, decay, t1, t2);
        const double f =
            average_fidelity(schedule_state_map(schedule, spec, decay), spec, quad);
        grid.values[idx] = f;
    });
    return grid;
}

FidelityGrid sweep_gamma(const TransferSpec& spec, double gamma0,
                         const std::vector<double>& gamma_grid,
                         const ThetaQuadrature& quad) {
    validate_axis(gamma_grid, "sweep_gamma: gamma");
    if (gamma_grid.front() < 0.0) {
        throw InputError("sweep_gamma: decay rates must be >= 0");
    }

    FidelityGrid grid;
    grid.axis1 = {"gamma", gamma_grid};
    grid.values.assign(gamma_grid.size(), 0.0);

    parallel_for(grid.values.size(), [&](std::size_t idx) {
        const DecayRate decay(gamma_grid[idx]);
        try {
            const auto schedule = standard_schedule(spec, gamma0, decay);
            grid.values[idx] =
                average_fidelity(schedule_state_map(schedule, spec, decay), spec, quad);
        } catch (const OverdampedError&) {
            grid.values[idx] = kNan;  // outside the matched-pulse domain
        }
    });
    return grid;
}

TimeErrorResult sweep_time_error(const TransferSpec& spec, double gamma0,
                                 const std::vector<double>& decay_list,
                                 const std::vector<double>& offset_grid,
                                 const ThetaQuadrature& quad) {
    if (decay_list.empty()) {
        throw InputError("sweep_time_error: decay list must be non-empty");
    }
    validate_axis(offset_grid, "sweep_time_error: offset");

    TimeErrorResult result;
    result.decay_values = decay_list;
    for (double gamma : decay_list) {
        const DecayRate decay(gamma);
        const double tp =
            std::numbers::pi / damped_frequency(gamma0, gamma0, decay.gamma);
        if (tp + offset_grid.front() < 0.0) {
            throw InputError("sweep_time_error: offsets must keep durations positive");
        }

        auto fidelity_at = [&](double offset) {
            const auto schedule =
                schedule_with_durations(spec, gamma0, decay, tp + offset, tp + offset);
            return average_fidelity(schedule_state_map(schedule, spec, decay), spec, quad);
        };

        FidelityGrid curve;
        curve.axis1 = {"offset", offset_grid};
        curve.values.assign(offset_grid.size(), 0.0);
        parallel_for(offset_grid.size(),
                     [&](std::size_t idx) { curve.values[idx] = fidelity_at(offset_grid[idx]); });

        const std::size_t best = static_cast<std::size_t>(
            std::max_element(curve.values.begin(), curve.values.end()) -
            curve.values.begin());
        const double lo = offset_grid[best == 0 ? 0 : best - 1];
        const double hi = offset_grid[std::min(best + 1, offset_grid.size() - 1)];
        const double peak =
            lo < hi ? golden_section_max(fidelity_at, lo, hi, 1e-6) : offset_grid[best];

        result.curves.push_back(std::move(curve));
        result.peak_offsets.push_back(peak);
    }
    return result;
}

int sweep_thread_cap() {
    if (const char* env = std::getenv("QST_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) {
            return static_cast<int>(v);
        }
        throw InputError("QST_THREADS: expected an integer in [1, 1024]");
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qst
