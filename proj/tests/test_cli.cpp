#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qst/fidelity.hpp"
#include "qst/protocol.hpp"

using namespace qst;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

fs::path temp_file(const std::string& stem) {
    static int counter = 0;
    return fs::temp_directory_path() /
           (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
}

CliResult run_cli(const std::string& args) {
    const fs::path out = temp_file("qst_cli_out");
    const std::string cmd = std::string("\"") + QST_CLI_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    fs::remove(out);
    return result;
}

// Value of the first "key=value" line with the given key.
std::string find_value(const std::string& text, const std::string& key) {
    std::istringstream stream(text);
    std::string line;
    const std::string prefix = key + "=";
    while (std::getline(stream, line)) {
        if (line.rfind(prefix, 0) == 0) {
            return line.substr(prefix.size());
        }
    }
    return {};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream fs_line(line);
        std::string field;
        while (std::getline(fs_line, field, ',')) {
            fields.push_back(field);
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run-protocol reports the lossless transfer") {
    const CliResult r = run_cli("run-protocol --from 1 --to 2 --gamma0 1 --decay 0");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(find_value(r.output, "average_fidelity")) - 1.0) < 1e-6);
    CHECK(std::abs(std::stod(find_value(r.output, "state_fidelity")) - 1.0) < 1e-6);
    CHECK(std::abs(std::stod(find_value(r.output, "total_duration")) -
                   std::numbers::sqrt2 * std::numbers::pi) < 1e-9);
}

TEST_CASE("run-protocol rejects invalid pulse counts") {
    const CliResult r = run_cli("run-protocol --decay 0 --k1 0");
    CHECK(r.exit_code != 0);
}

TEST_CASE("run-protocol fidelity equals the library value under decay") {
    const CliResult r = run_cli("run-protocol --from 1 --to 2 --gamma0 1 --decay 0.1");
    REQUIRE(r.exit_code == 0);
    const double reported = std::stod(find_value(r.output, "average_fidelity"));
    CHECK(reported > 0.0);
    CHECK(reported < 1.0);

    const TransferSpec spec(1, 2);
    const DecayRate decay(0.1);
    const double expected = average_fidelity(
        schedule_state_map(standard_schedule(spec, 1.0, decay), spec, decay), spec);
    CHECK(std::abs(reported - expected) < 1e-11);
}

TEST_CASE("run-protocol accepts complex amplitude literals") {
    const CliResult r = run_cli("run-protocol --alpha 0.6+0.8i --beta 0 --decay 0");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(find_value(r.output, "state_fidelity")) - 1.0) < 1e-6);

    const CliResult bad = run_cli("run-protocol --alpha 0.6+0.8x --beta 0");
    CHECK(bad.exit_code != 0);
}

TEST_CASE("gamma sweep CSV is monotone and deterministic") {
    const fs::path csv1 = temp_file("sweep_gamma1");
    const fs::path csv2 = temp_file("sweep_gamma2");
    const std::string args = "sweep --kind gamma --gamma-min 0 --gamma-max 0.1 "
                             "--gamma-points 11 --output ";
    REQUIRE(run_cli(args + "\"" + csv1.string() + "\"").exit_code == 0);
    REQUIRE(run_cli(args + "\"" + csv2.string() + "\"").exit_code == 0);

    const std::string text = read_file(csv1);
    CHECK(text == read_file(csv2));

    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 12);  // header + 11 points
    CHECK(rows[0] == std::vector<std::string>{"gamma", "t_p", "fidelity"});
    double previous = 2.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double f = std::stod(rows[i][2]);
        CHECK(f < previous);
        previous = f;
    }

    fs::remove(csv1);
    fs::remove(csv2);
}

TEST_CASE("times sweep CSV reaches unit fidelity at the pulse point") {
    // Default grid: 41x41 over one full period per axis.
    const fs::path csv = temp_file("sweep_times");
    const CliResult r =
        run_cli("sweep --kind times --decay 0 --output \"" + csv.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(read_file(csv));
    REQUIRE(rows.size() == 1682);  // header + 41*41 points
    CHECK(rows[0][0] == "t1");
    double best = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        best = std::max(best, std::stod(rows[i][4]));
    }
    CHECK(std::abs(best - 1.0) < 1e-6);
    fs::remove(csv);
}

TEST_CASE("time-error sweep appends one peak trailer per curve") {
    const fs::path csv = temp_file("sweep_offset");
    const CliResult r = run_cli(
        "sweep --kind time-error --decay-list 0 0.05 0.1 --offset-points 41 --output \"" +
        csv.string() + "\"");
    REQUIRE(r.exit_code == 0);
    const std::string text = read_file(csv);

    std::vector<double> peaks;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        const std::string prefix = "# peak_offset=";
        if (line.rfind(prefix, 0) == 0) {
            peaks.push_back(std::stod(line.substr(prefix.size())));
        }
    }
    REQUIRE(peaks.size() == 3);
    CHECK(std::abs(peaks[0]) < 0.06);  // within one grid step of zero
    CHECK(peaks[2] < 0.0);
    fs::remove(csv);
}

TEST_CASE("sweep validates its grids and kind") {
    CHECK(run_cli("sweep --kind gamma --gamma-points 0").exit_code != 0);
    CHECK(run_cli("sweep --kind bogus").exit_code != 0);
    CHECK(run_cli("sweep --kind gamma --gamma-min 0.2 --gamma-max 0.1").exit_code != 0);
}

TEST_CASE("coupling report") {
    SUBCASE("no drive yields zero coupling") {
        const CliResult r = run_cli("coupling --epsilon 0");
        REQUIRE(r.exit_code == 0);
        CHECK(find_value(r.output, "J") == "0");
    }
    SUBCASE("unit ratio without loss") {
        const CliResult r = run_cli("coupling --nu 0 --length 3");
        REQUIRE(r.exit_code == 0);
        CHECK(find_value(r.output, "ratio") == "1");
    }
    SUBCASE("length scan reports the 90% crossing") {
        const CliResult r = run_cli("coupling --nu 0.08 --scan-length");
        REQUIRE(r.exit_code == 0);
        const std::string value = find_value(r.output, "ratio_0.9_at_L");
        REQUIRE(!value.empty());
        REQUIRE(value != "none");
        const double l = std::stod(value);
        CHECK(l > 0.0);

        const CavityParams params{10.0, 1.0, 10.0, 1.0, std::numbers::pi / 4.0, 0.08, l};
        CHECK(std::abs(fiber_loss_ratio(params) - 0.9) < 1e-6);
    }
}

TEST_CASE("validate suite passes end to end") {
    const CliResult r = run_cli("validate --gamma 0.05 --gamma 0.1 --full-model --J 1000");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ALL CHECKS PASSED") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
    CHECK(r.output.find("# note:") != std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
    const fs::path cfg = temp_file("run_cfg");
    {
        std::ofstream out(cfg);
        out << "decay=0.1\n";
    }
    const CliResult from_file =
        run_cli("run-protocol --config \"" + cfg.string() + "\"");
    REQUIRE(from_file.exit_code == 0);
    CHECK(std::stod(find_value(from_file.output, "average_fidelity")) < 1.0);

    const CliResult overridden =
        run_cli("run-protocol --config \"" + cfg.string() + "\" --decay 0");
    REQUIRE(overridden.exit_code == 0);
    CHECK(std::abs(std::stod(find_value(overridden.output, "average_fidelity")) - 1.0) <
          1e-6);
    fs::remove(cfg);
}

TEST_CASE("schedule files drive run-protocol") {
    const fs::path sched = temp_file("schedule_txt");
    {
        std::ofstream out(sched);
        out << format_schedule(standard_schedule(TransferSpec(1, 2), 1.0, DecayRate(0.0)));
    }
    const CliResult r =
        run_cli("run-protocol --schedule \"" + sched.string() + "\" --decay 0");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(std::stod(find_value(r.output, "average_fidelity")) - 1.0) < 1e-6);
    fs::remove(sched);
}
