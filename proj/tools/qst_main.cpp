// qst: simulate the two-step state-transfer protocol on a three-atom Ising
// ring. Subcommands: run-protocol, sweep, coupling, validate. All rates are
// in units of Gamma_0 and times in units of 1/Gamma_0. Every reported number
// comes from the library API; the tool only formats.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qst/analytic.hpp"
#include "qst/fidelity.hpp"
#include "qst/hamiltonians.hpp"
#include "qst/linalg.hpp"
#include "qst/protocol.hpp"

namespace {

using namespace qst;

std::string fmt12(double v) {
    if (v == 0.0) {
        return "0";  // canonicalize negative zero
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_complex(Complex v) {
    return "(" + fmt12(v.real()) + "," + fmt12(v.imag()) + ")";
}

const char* basis_label(int b) {
    static const char* labels[8] = {"ggg", "gge", "geg", "gee",
                                    "egg", "ege", "eeg", "eee"};
    return labels[b];
}

// Complex literal "a+bi" (also plain "a", "bi", "i", "-i").
Complex parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    if (s.empty()) {
        throw CLI::ValidationError("complex", "empty complex literal");
    }
    auto to_double = [](const std::string& text) {
        if (text.empty() || text == "+") {
            return 1.0;
        }
        if (text == "-") {
            return -1.0;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError("complex", "cannot parse number '" + text + "'");
        }
        if (used != text.size()) {
            throw CLI::ValidationError("complex", "trailing characters in '" + text + "'");
        }
        return v;
    };

    const char tail = s.back();
    if (tail != 'i' && tail != 'I') {
        return Complex(to_double(s), 0.0);
    }
    s.pop_back();
    // Split at the sign separating real and imaginary parts, skipping the
    // leading sign and exponent signs.
    std::size_t split = std::string::npos;
    for (std::size_t p = s.size(); p-- > 1;) {
        if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
            split = p;
            break;
        }
    }
    if (split == std::string::npos) {
        return Complex(0.0, to_double(s));
    }
    return Complex(to_double(s.substr(0, split)), to_double(s.substr(split)));
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary);
            if (!file) {
                throw std::runtime_error("cannot open output file: " + path);
            }
            stream = &file;
        }
    }
    std::ostream& out() { return *stream; }
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_config_value(const std::string& text);

template <>
double parse_config_value<double>(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--config", "cannot parse number '" + text + "'");
}

template <>
int parse_config_value<int>(const std::string& text) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--config", "cannot parse integer '" + text + "'");
}

template <>
std::string parse_config_value<std::string>(const std::string& text) {
    return text;
}

template <>
bool parse_config_value<bool>(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw CLI::ValidationError("--config", "cannot parse boolean '" + text + "'");
}

template <>
std::vector<double> parse_config_value<std::vector<double>>(const std::string& text) {
    std::vector<double> out;
    std::string piece;
    std::istringstream stream(text);
    while (std::getline(stream, piece, ',')) {
        std::istringstream fields(piece);
        std::string field;
        while (fields >> field) {
            out.push_back(parse_config_value<double>(field));
        }
    }
    if (out.empty()) {
        throw CLI::ValidationError("--config", "empty number list");
    }
    return out;
}

// Subcommand options plus an optional "key=value" config file. File values
// fill in options that were not given on the command line, so flags always
// override the file.
class ConfigurableCommand {
public:
    explicit ConfigurableCommand(CLI::App* sub) : app_(sub) {
        app_->add_option("--config", config_path_,
                         "key=value config file; explicit flags take precedence");
    }

    template <typename T>
    CLI::Option* option(const std::string& name, T& target, const std::string& help) {
        setters_[name.substr(2)] = [&target](const std::string& text) {
            target = parse_config_value<T>(text);
        };
        return app_->add_option(name, target, help);
    }

    CLI::Option* flag(const std::string& name, bool& target, const std::string& help) {
        setters_[name.substr(2)] = [&target](const std::string& text) {
            target = parse_config_value<bool>(text);
        };
        return app_->add_flag(name, target, help);
    }

    void apply_config() const {
        if (config_path_.empty()) {
            return;
        }
        std::ifstream in(config_path_);
        if (!in) {
            throw CLI::ValidationError("--config", "cannot open " + config_path_);
        }
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            const std::string entry = trim(line);
            if (entry.empty()) {
                continue;
            }
            const auto eq = entry.find('=');
            if (eq == std::string::npos) {
                throw CLI::ValidationError(
                    "--config", "line " + std::to_string(line_no) + ": expected key=value");
            }
            const std::string key = trim(entry.substr(0, eq));
            const std::string value = trim(entry.substr(eq + 1));
            const auto setter = setters_.find(key);
            if (setter == setters_.end()) {
                throw CLI::ValidationError("--config", "unknown key '" + key + "'");
            }
            if (app_->count("--" + key) == 0) {
                setter->second(value);
            }
        }
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::map<std::string, std::function<void(const std::string&)>> setters_;
};

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) {
        throw CLI::ValidationError("grid", "point count must be >= 1");
    }
    if (points > 1 && !(hi > lo)) {
        throw CLI::ValidationError("grid", "grid max must exceed min");
    }
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        g[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    }
    return g;
}

// ---------------------------------------------------------------------------
// run-protocol

struct RunProtocolConfig {
    int from = 1;
    int to = 2;
    double gamma0 = 1.0;
    double decay = 0.0;
    int k1 = 1;
    int k2 = 1;
    std::string alpha = "1";
    std::string beta = "0";
    std::string model = "secular";
    double coupling_j = 100.0;
    std::string schedule_file;
    std::string output;
};

int cmd_run_protocol(const RunProtocolConfig& cfg) {
    const TransferSpec spec(cfg.from, cfg.to);
    const DecayRate decay(cfg.decay);
    const InputState input(parse_complex(cfg.alpha), parse_complex(cfg.beta));
    const Model model = cfg.model == "full" ? Model::full_effective(cfg.coupling_j)
                                            : Model::secular();

    PulseSchedule schedule;
    if (!cfg.schedule_file.empty()) {
        std::ifstream in(cfg.schedule_file, std::ios::binary);
        if (!in) {
            throw std::runtime_error("cannot open schedule file: " + cfg.schedule_file);
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        schedule = parse_schedule(buffer.str());
    } else {
        schedule = standard_schedule(spec, cfg.gamma0, decay, cfg.k1, cfg.k2);
    }

    const Ket final_state = run_schedule(schedule, input, spec, decay, model);
    const Ket target = target_state(input, spec);
    const Complex overlap = (target.amplitudes.adjoint() * final_state.amplitudes)(0);
    const double favg =
        average_fidelity(schedule_state_map(schedule, spec, decay, model), spec);

    OutputTarget sink(cfg.output);
    auto& out = sink.out();
    out << "# segments (G1 G2 G3 DURATION)\n";
    for (const auto& seg : schedule.segments) {
        out << fmt12(seg.rabi.gamma1) << " " << fmt12(seg.rabi.gamma2) << " "
            << fmt12(seg.rabi.gamma3) << " " << fmt12(seg.duration) << "\n";
    }
    out << "total_duration=" << fmt12(schedule.total_duration()) << "\n";
    for (int b = 0; b < 8; ++b) {
        out << "amp[" << basis_label(b) << "]=" << fmt_complex(final_state.amplitudes[b])
            << "\n";
    }
    out << "overlap=" << fmt_complex(overlap) << "\n";
    out << "state_fidelity=" << fmt12(state_fidelity(final_state, target)) << "\n";
    out << "average_fidelity=" << fmt12(favg) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepConfig {
    std::string kind;
    int from = 1;
    int to = 2;
    double gamma0 = 1.0;
    double decay = 0.0;
    std::vector<double> decay_list{0.0, 0.05, 0.1};
    double t1_min = 0.0, t1_max = 0.0;
    int t1_points = 41;
    double t2_min = 0.0, t2_max = 0.0;
    int t2_points = 41;
    double gamma_min = 0.0, gamma_max = 0.1;
    int gamma_points = 11;
    double offset_min = 0.0, offset_max = 0.0;
    int offset_points = 101;
    int nodes = 720;
    std::string output;
};

int cmd_sweep(SweepConfig& cfg) {
    const TransferSpec spec(cfg.from, cfg.to);
    const ThetaQuadrature quad(cfg.nodes);
    OutputTarget sink(cfg.output);
    auto& out = sink.out();

    if (cfg.kind == "times") {
        const DecayRate decay(cfg.decay);
        const double tp =
            std::numbers::pi / damped_frequency(cfg.gamma0, cfg.gamma0, cfg.decay);
        if (cfg.t1_max == 0.0) {
            cfg.t1_max = 2.0 * tp;  // one full period per axis by default
        }
        if (cfg.t2_max == 0.0) {
            cfg.t2_max = 2.0 * tp;
        }
        const auto t1 = linear_grid(cfg.t1_min, cfg.t1_max, cfg.t1_points);
        const auto t2 = linear_grid(cfg.t2_min, cfg.t2_max, cfg.t2_points);
        const auto grid = sweep_times(spec, cfg.gamma0, decay, t1, t2, quad);
        out << "t1,t2,t1_pulse_units,t2_pulse_units,fidelity\n";
        for (std::size_t i = 0; i < grid.rows(); ++i) {
            for (std::size_t j = 0; j < grid.cols(); ++j) {
                out << fmt12(t1[i]) << "," << fmt12(t2[j]) << "," << fmt12(t1[i] / tp)
                    << "," << fmt12(t2[j] / tp) << "," << fmt12(grid.at(i, j)) << "\n";
            }
        }
        return 0;
    }

    if (cfg.kind == "gamma") {
        const auto gammas = linear_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points);
        const auto grid = sweep_gamma(spec, cfg.gamma0, gammas, quad);
        out << "gamma,t_p,fidelity\n";
        for (std::size_t i = 0; i < grid.rows(); ++i) {
            double tp = std::numeric_limits<double>::quiet_NaN();
            try {
                tp = std::numbers::pi / damped_frequency(cfg.gamma0, cfg.gamma0, gammas[i]);
            } catch (const OverdampedError&) {
            }
            out << fmt12(gammas[i]) << "," << fmt12(tp) << "," << fmt12(grid.at(i))
                << "\n";
        }
        return 0;
    }

    if (cfg.kind == "time-error") {
        if (cfg.offset_max == 0.0 && cfg.offset_min == 0.0) {
            const double tp =
                std::numbers::pi / damped_frequency(cfg.gamma0, cfg.gamma0, 0.0);
            cfg.offset_min = -0.5 * tp;
            cfg.offset_max = 0.5 * tp;
        }
        const auto offsets =
            linear_grid(cfg.offset_min, cfg.offset_max, cfg.offset_points);
        const auto result =
            sweep_time_error(spec, cfg.gamma0, cfg.decay_list, offsets, quad);

        out << "offset,offset_pulse_units";
        for (double g : result.decay_values) {
            out << ",F_gamma_" << fmt12(g);
        }
        out << "\n";
        const double tp0 =
            std::numbers::pi / damped_frequency(cfg.gamma0, cfg.gamma0, 0.0);
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            out << fmt12(offsets[i]) << "," << fmt12(offsets[i] / tp0);
            for (const auto& curve : result.curves) {
                out << "," << fmt12(curve.at(i));
            }
            out << "\n";
        }
        for (double peak : result.peak_offsets) {
            out << "# peak_offset=" << fmt12(peak) << "\n";
        }
        return 0;
    }

    throw CLI::ValidationError("--kind", "unknown sweep kind: " + cfg.kind);
}

// ---------------------------------------------------------------------------
// coupling

struct CouplingConfig {
    double kappa = 10.0;
    double g = 1.0;
    double delta = 10.0;
    double epsilon = 1.0;
    double phi = std::numbers::pi / 4.0;
    double nu = 0.0;
    double length = 0.0;
    double gamma0 = 1.0;
    bool scan_length = false;
    double scan_max = 40.0;
    int scan_points = 81;
    double ratio_target = 0.9;
    std::string output;
};

int cmd_coupling(const CouplingConfig& cfg) {
    const CavityParams params{cfg.kappa, cfg.g,  cfg.delta,  cfg.epsilon,
                              cfg.phi,   cfg.nu, cfg.length};
    CavityParams lossless = params;
    lossless.nu = 0.0;

    const CouplingResult base = compute_coupling(lossless);
    const CouplingResult lossy = compute_coupling(params);

    OutputTarget sink(cfg.output);
    auto& out = sink.out();
    out << "J=" << fmt12(base.j) << "\n";
    out << "J_with_loss=" << fmt12(lossy.j) << "\n";
    std::string ratio_text = "undefined";  // J(nu=0) = 0 leaves it meaningless
    try {
        ratio_text = fmt12(fiber_loss_ratio(params));
    } catch (const SingularParameterError&) {
    }
    out << "ratio=" << ratio_text << "\n";
    out << "kappa_over_g=" << fmt12(lossy.kappa_over_g) << "\n";
    out << "delta_over_kappa=" << fmt12(lossy.delta_over_kappa) << "\n";
    out << "within_validity_window=" << (lossy.within_validity_window ? "yes" : "no")
        << "\n";
    out << "gamma0_over_J=" << fmt12(cfg.gamma0 / lossy.j) << "\n";

    if (cfg.scan_length) {
        out << "# L ratio\n";
        for (const auto& [l, ratio] :
             scan_fiber_length(params, cfg.scan_max, cfg.scan_points)) {
            out << fmt12(l) << " " << fmt12(ratio) << "\n";
        }
        const auto crossing =
            find_loss_ratio_length(params, cfg.ratio_target, cfg.scan_max);
        if (crossing) {
            out << "ratio_" << fmt12(cfg.ratio_target) << "_at_L=" << fmt12(*crossing)
                << "\n";
        } else {
            out << "ratio_" << fmt12(cfg.ratio_target) << "_at_L=none\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateConfig {
    std::vector<double> gammas;
    bool full_model = false;
    double coupling_j = 1000.0;
    std::string output;
};

struct CheckReporter {
    std::ostream& out;
    bool all_passed = true;

    void check(const std::string& name, double err, double tol) {
        const bool ok = err < tol;
        all_passed = all_passed && ok;
        out << (ok ? "PASS " : "FAIL ") << name << " max_err=" << fmt12(err)
            << " tol=" << fmt12(tol) << "\n";
    }
    void note(const std::string& text) { out << "# note: " << text << "\n"; }
};

double max_amp_diff(const Ket& a, const Ket& b) {
    return (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff();
}

Ket damped_to_full(const SubspaceCoefficients& c) {
    Vector amp = Vector::Zero(8);
    amp[5] = c.c1;  // |ege>
    amp[4] = c.c2;  // |egg>
    amp[1] = c.c3;  // |gge>
    return Ket(Basis::Full8, std::move(amp));
}

void validate_lossless(CheckReporter& rep) {
    const double pi = std::numbers::pi;

    // Closed-form subspace coefficients against RK4 on random drive pairs.
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(0.2, 2.0);
    double worst = 0.0;
    for (int pair = 0; pair < 5; ++pair) {
        const double g1 = dist(rng);
        const double g2 = dist(rng);
        const double omega = std::hypot(g1, g2);
        const Operator h = build_subspace_h(g1, g2);
        Vector v0 = Vector::Zero(3);
        v0[1] = 1.0;
        const Ket psi0(Basis::SubLossless, v0);
        for (int i = 0; i < 100; ++i) {
            const double t = 4.0 * pi / omega * (i + 1) / 100.0;
            const Ket oracle = rk4_propagate(h, psi0, t);
            const Ket closed = coefficients_lossless(1.0, g1, g2, t).to_ket();
            worst = std::max(worst, max_amp_diff(oracle, closed));
        }
    }
    rep.check("lossless_coefficients_vs_rk4", worst, 1e-8);

    // expm against RK4 on random operators.
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_expm = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = trial % 2 == 0 ? 3 : 8;
        Matrix m(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                m(r, c) = Complex(gauss(rng), gauss(rng));
            }
        }
        if (trial % 3 == 0) {
            m = ((m + m.adjoint()) / 2.0).eval();
        }
        m *= 3.0 / std::max(1.0, m.norm());
        const bool herm = (m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12;
        const Operator h(m, herm);
        Vector v = Vector::Zero(dim);
        v[0] = 1.0;
        const Ket psi(dim == 8 ? Basis::Full8 : Basis::SubLossless, v);
        const double t = 0.3 + 0.1 * trial;
        worst_expm = std::max(
            worst_expm, max_amp_diff(expm_apply(h, psi, t), rk4_propagate(h, psi, t)));
    }
    rep.check("expm_vs_rk4_random_operators", worst_expm, 1e-8);

    // Eigensystem orthogonality and diagonalization.
    double worst_eig = 0.0;
    for (auto [g1, g2] : {std::pair{1.0, 1.0}, {3.0, 4.0}, {0.7, 1.9}}) {
        const Eigensystem es = eigensystem(g1, g2);
        const Eigen::Matrix3d identity_err =
            es.s * es.s.transpose() - Eigen::Matrix3d::Identity();
        const Eigen::Matrix3d h = build_subspace_h(g1, g2).entries.real();
        Eigen::Matrix3d diag = es.s * h * es.s.transpose();
        for (int i = 0; i < 3; ++i) {
            diag(i, i) -= es.eigenvalues[i];
        }
        worst_eig = std::max({worst_eig, identity_err.cwiseAbs().maxCoeff(),
                              diag.cwiseAbs().maxCoeff()});
    }
    rep.check("eigensystem_orthogonal_diagonalizing", worst_eig, 1e-12);

    // Perfect transfer and the sign ledger.
    const TransferSpec spec(1, 2);
    const DecayRate no_decay(0.0);
    const auto schedule = standard_schedule(spec, 1.0, no_decay);
    rep.check("protocol_duration_sqrt2_pi",
              std::abs(schedule.total_duration() - std::numbers::sqrt2 * pi), 1e-12);

    const double favg =
        average_fidelity(schedule_state_map(schedule, spec, no_decay), spec);
    rep.check("perfect_transfer_average_fidelity", std::abs(favg - 1.0), 1e-9);

    const InputState in(0.6, 0.8);
    const PulseSchedule first_only{{schedule.segments[0]}};
    const Ket one = run_schedule(first_only, in, spec, no_decay);
    rep.check("one_step_alpha_sign_flip",
              std::abs(one.amplitudes[1] - Complex(-0.6, 0.0)), 1e-9);
    const Ket two = run_schedule(schedule, in, spec, no_decay);
    rep.check("two_step_target_reached", max_amp_diff(two, target_state(in, spec)), 1e-8);
}

void validate_damped(CheckReporter& rep, double gamma) {
    const double pi = std::numbers::pi;
    const DecayRate decay(gamma);
    const TransferSpec spec(1, 2);
    const std::string suffix = "_gamma_" + fmt12(gamma);

    // Subspace closed form against the full 8-dim non-hermitian oracle.
    const RabiTriple drive13(1.0, 0.0, 1.0);
    const Operator h = build_nonhermitian(drive13, decay);
    const InputState in(1.0, 0.0);
    const Ket psi0 = initial_state(in, spec);
    const double lambda = damped_frequency(1.0, 1.0, gamma);
    double worst = 0.0;
    double worst_variant = 0.0;
    for (int i = 1; i <= 40; ++i) {
        const double t = 2.0 * pi / lambda * i / 40.0;
        const Ket oracle = rk4_propagate(h, psi0, t);
        const Ket closed = damped_to_full(coefficients_damped(1.0, 1.0, 1.0, decay, t));
        worst = std::max(worst, max_amp_diff(oracle, closed));

        // Rejected sin-term variant (gamma/Lambda instead of gamma/(2 Lambda)),
        // tracked for the documentation note below.
        const double c = std::cos(lambda * t), s = std::sin(lambda * t);
        const double env = std::exp(-gamma * t), eh = std::exp(-0.5 * gamma * t);
        const double u_variant = c + (gamma / lambda) * s;
        SubspaceCoefficients variant;
        variant.basis = Basis::SubDamped;
        variant.c1 = Complex(0.0, -1.0) * (1.0 / lambda) * env * eh * s;
        variant.c2 = env * (1.0 + eh * u_variant) / 2.0;
        variant.c3 = 0.5 * env * (eh * u_variant - 1.0);
        worst_variant =
            std::max(worst_variant, max_amp_diff(oracle, damped_to_full(variant)));
    }
    rep.check("damped_coefficients_vs_oracle" + suffix, worst, 1e-6);

    // Pi-pulse structure: residual/transferred amplitude pair.
    const Ket one_oracle = rk4_propagate(h, psi0, pi / lambda);
    const Ket one_closed = one_step_state(in, 1.0, decay, 1);
    rep.check("one_step_structure_vs_oracle" + suffix,
              max_amp_diff(one_oracle, one_closed), 1e-6);

    // Full two-step protocol.
    const auto schedule = standard_schedule(spec, 1.0, decay);
    Ket two_oracle = psi0;
    for (const auto& seg : schedule.segments) {
        two_oracle =
            rk4_propagate(build_nonhermitian(seg.rabi, decay), two_oracle, seg.duration);
    }
    const Ket two_closed = two_step_state(in, 1.0, decay);
    rep.check("two_step_state_vs_oracle" + suffix, max_amp_diff(two_oracle, two_closed),
              1e-6);

    // Rejected exponent variant for the residual term.
    Vector variant_amp = two_closed.amplitudes;
    const double tp = pi / lambda;
    variant_amp[4] = -in.alpha * 0.5 * (1.0 - std::exp(-0.5 * gamma * tp)) *
                     std::exp(-gamma * 4.0 * tp);
    const double variant_err = (two_oracle.amplitudes - variant_amp).cwiseAbs().maxCoeff();

    rep.note(
        "damped sin-term coefficient gamma/(2*Lambda) is the oracle-confirmed form; "
        "the gamma/Lambda variant deviates by " +
        fmt12(worst_variant) + " at gamma=" + fmt12(gamma));
    rep.note(
        "two-step residual exponent gamma*(t1+1.5*t2) is the oracle-confirmed form; "
        "the gamma*(t1+3*t2) variant deviates by " +
        fmt12(variant_err) + " at gamma=" + fmt12(gamma));
}

void validate_full_model(CheckReporter& rep, double j) {
    const TransferSpec spec(1, 2);
    const DecayRate no_decay(0.0);
    const auto schedule = standard_schedule(spec, 1.0, no_decay);
    const double f_secular =
        average_fidelity(schedule_state_map(schedule, spec, no_decay), spec);
    const double f_full = average_fidelity(
        schedule_state_map(schedule, spec, no_decay, Model::full_effective(j)), spec);
    const double tol = j >= 1000.0 ? 1e-3 : (j >= 100.0 ? 1e-2 : 5e-2);
    rep.check("secular_gap_J_" + fmt12(j), std::abs(f_secular - f_full), tol);
}

int cmd_validate(const ValidateConfig& cfg) {
    OutputTarget sink(cfg.output);
    CheckReporter rep{sink.out()};

    validate_lossless(rep);
    for (double gamma : cfg.gammas) {
        if (gamma > 0.0) {
            validate_damped(rep, gamma);
        }
    }
    if (cfg.full_model) {
        validate_full_model(rep, cfg.coupling_j);
    }

    sink.out() << (rep.all_passed ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n");
    return rep.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-step quantum state transfer on a three-atom Ising ring"};
    app.require_subcommand(1);

    RunProtocolConfig run_cfg;
    auto* run = app.add_subcommand(
        "run-protocol", "Execute the two-step transfer and report the final state");
    ConfigurableCommand run_opts(run);
    run_opts.option("--from", run_cfg.from, "Source atom (1-3)")->check(CLI::Range(1, 3));
    run_opts.option("--to", run_cfg.to, "Target atom (1-3)")->check(CLI::Range(1, 3));
    run_opts.option("--gamma0", run_cfg.gamma0, "Drive Rabi frequency Gamma_0");
    run_opts.option("--decay", run_cfg.decay, "Spontaneous emission rate gamma")
        ->check(CLI::NonNegativeNumber);
    run_opts.option("--k1", run_cfg.k1, "Pulse multiplicity of segment 1")
        ->check(CLI::PositiveNumber);
    run_opts.option("--k2", run_cfg.k2, "Pulse multiplicity of segment 2")
        ->check(CLI::PositiveNumber);
    run_opts.option("--alpha", run_cfg.alpha, "Input amplitude on |e>, literal a+bi");
    run_opts.option("--beta", run_cfg.beta, "Input amplitude on |g>, literal a+bi");
    run_opts.option("--model", run_cfg.model, "Propagation model")
        ->check(CLI::IsMember({"secular", "full"}));
    run_opts.option("--J", run_cfg.coupling_j, "Ring coupling for --model full");
    run_opts.option("--schedule", run_cfg.schedule_file,
                    "Run a schedule file instead of the standard sequence");
    run_opts.option("--output", run_cfg.output, "Write the report to a file");

    SweepConfig sweep_cfg;
    auto* sweep = app.add_subcommand("sweep", "Write a fidelity sweep as CSV");
    ConfigurableCommand sweep_opts(sweep);
    sweep_opts.option("--kind", sweep_cfg.kind, "times | gamma | time-error")->required();
    sweep_opts.option("--from", sweep_cfg.from, "Source atom (1-3)")
        ->check(CLI::Range(1, 3));
    sweep_opts.option("--to", sweep_cfg.to, "Target atom (1-3)")->check(CLI::Range(1, 3));
    sweep_opts.option("--gamma0", sweep_cfg.gamma0, "Drive Rabi frequency Gamma_0");
    sweep_opts.option("--decay", sweep_cfg.decay, "Decay rate for the times sweep")
        ->check(CLI::NonNegativeNumber);
    sweep_opts.option("--decay-list", sweep_cfg.decay_list,
                      "Decay rates for the time-error sweep");
    sweep_opts.option("--t1-min", sweep_cfg.t1_min, "First-segment duration grid start");
    sweep_opts.option("--t1-max", sweep_cfg.t1_max, "First-segment duration grid end");
    sweep_opts.option("--t1-points", sweep_cfg.t1_points, "First-segment grid points")
        ->check(CLI::PositiveNumber);
    sweep_opts.option("--t2-min", sweep_cfg.t2_min, "Second-segment duration grid start");
    sweep_opts.option("--t2-max", sweep_cfg.t2_max, "Second-segment duration grid end");
    sweep_opts.option("--t2-points", sweep_cfg.t2_points, "Second-segment grid points")
        ->check(CLI::PositiveNumber);
    sweep_opts.option("--gamma-min", sweep_cfg.gamma_min, "Decay grid start");
    sweep_opts.option("--gamma-max", sweep_cfg.gamma_max, "Decay grid end");
    sweep_opts.option("--gamma-points", sweep_cfg.gamma_points, "Decay grid points")
        ->check(CLI::PositiveNumber);
    sweep_opts.option("--offset-min", sweep_cfg.offset_min, "Time-offset grid start");
    sweep_opts.option("--offset-max", sweep_cfg.offset_max, "Time-offset grid end");
    sweep_opts.option("--offset-points", sweep_cfg.offset_points,
                      "Time-offset grid points")
        ->check(CLI::PositiveNumber);
    sweep_opts.option("--nodes", sweep_cfg.nodes,
                      "Quadrature nodes for the input average")
        ->check(CLI::PositiveNumber);
    sweep_opts.option("--output", sweep_cfg.output, "CSV output path (default stdout)");

    CouplingConfig coupling_cfg;
    auto* coupling = app.add_subcommand(
        "coupling", "Compute the ring coupling J from cavity parameters");
    ConfigurableCommand coupling_opts(coupling);
    coupling_opts.option("--kappa", coupling_cfg.kappa, "Cavity leak rate");
    coupling_opts.option("--g", coupling_cfg.g, "Atom-cavity coupling");
    coupling_opts.option("--delta", coupling_cfg.delta, "Detuning");
    coupling_opts.option("--epsilon", coupling_cfg.epsilon, "Drive amplitude");
    coupling_opts.option("--phi", coupling_cfg.phi, "Fiber phase delay");
    coupling_opts.option("--nu", coupling_cfg.nu, "Fiber decay per meter");
    coupling_opts.option("--length", coupling_cfg.length, "Fiber length in meters");
    coupling_opts.option("--gamma0", coupling_cfg.gamma0, "Drive scale for the J margin");
    coupling_opts.flag("--scan-length", coupling_cfg.scan_length,
                       "Scan the loss ratio over fiber length");
    coupling_opts.option("--scan-max", coupling_cfg.scan_max, "Scan upper length");
    coupling_opts.option("--scan-points", coupling_cfg.scan_points, "Scan sample count")
        ->check(CLI::Range(2, 100000));
    coupling_opts.option("--ratio-target", coupling_cfg.ratio_target,
                         "Ratio whose crossing length is reported");
    coupling_opts.option("--output", coupling_cfg.output, "Write the report to a file");

    ValidateConfig validate_cfg;
    auto* validate =
        app.add_subcommand("validate", "Run the closed-form-vs-oracle validation suite");
    ConfigurableCommand validate_opts(validate);
    validate_opts.option("--gamma", validate_cfg.gammas,
                         "Decay rates for the damped validation checks");
    validate_opts.flag("--full-model", validate_cfg.full_model,
                       "Also compare the secular model against the full ring model");
    validate_opts.option("--J", validate_cfg.coupling_j,
                         "Ring coupling for --full-model");
    validate_opts.option("--output", validate_cfg.output, "Write the report to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            run_opts.apply_config();
            return cmd_run_protocol(run_cfg);
        }
        if (sweep->parsed()) {
            sweep_opts.apply_config();
            return cmd_sweep(sweep_cfg);
        }
        if (coupling->parsed()) {
            coupling_opts.apply_config();
            return cmd_coupling(coupling_cfg);
        }
        if (validate->parsed()) {
            validate_opts.apply_config();
            return cmd_validate(validate_cfg);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const qst::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
