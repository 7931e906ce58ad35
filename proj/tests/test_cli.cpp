#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef NCATOM_CLI_BINARY
#define NCATOM_CLI_BINARY "./ncatom"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + std::string(NCATOM_CLI_BINARY) + " " + args;
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("ncatom_test_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream fields(line);
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("solve: hydrogen ground state as JSON") {
    const RunResult r = run_cli("solve --n 1 --l 0 --alphaZ 7.29735e-3 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["n"] == 1);
    CHECK(j["l"] == 0);
    CHECK(std::abs(j["epsilon"].get<double>() / 0.776e-6 - 1.0) < 0.01);
    CHECK(j["eta"].get<double>() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(j["energy_model"].get<double>() < j["energy_schrodinger"].get<double>());
    CHECK(j["energy_klein_gordon"].get<double>() < j["energy_model"].get<double>());
    CHECK(j["root_count"].get<int>() >= 1);
    CHECK(j["residual"].get<double>() < 1e-10);
}

TEST_CASE("solve: supercritical coupling exits 2 with an error object") {
    const fs::path err = temp_file("solve_err.json");
    const RunResult r =
        run_cli("solve --n 1 --l 0 --alphaZ 0.52 2>" + err.string());
    CHECK(r.exit_code == 2);
    const json j = json::parse(slurp(err));
    CHECK(j["error"] == "no bound state");
    fs::remove(err);
}

TEST_CASE("solve: quantum-number validation exits 1") {
    CHECK(run_cli("solve --n 2 --l 5 --alphaZ 0.1 2>/dev/null").exit_code == 1);
    CHECK(run_cli("solve --n 1 --l 0 2>/dev/null").exit_code == 1);           // missing flag
    CHECK(run_cli("frobnicate 2>/dev/null").exit_code == 1);                  // no such command
    CHECK(run_cli("solve --n 1 --l 0 --alphaZ 0.1 --format csv 2>/dev/null").exit_code == 1);
}

TEST_CASE("sweep: ordering, hygiene and KG cutoff") {
    const RunResult r = run_cli("sweep --n 1 --l 0 --min 0.01 --max 0.5 --steps 50 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == std::vector<std::string>{"alphaZ", "epsilon", "energy_model",
                                              "energy_schrodinger", "energy_klein_gordon"});
    double prev_aZ = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 5);
        const double aZ = std::stod(rows[i][0]);
        CHECK(aZ > prev_aZ);
        prev_aZ = aZ;
        const double e_model = std::stod(rows[i][2]);
        const double e_s = std::stod(rows[i][3]);
        CHECK(e_model <= e_s);
        if (!rows[i][4].empty()) {
            const double e_kg = std::stod(rows[i][4]);
            CHECK(e_kg <= e_model);
        } else {
            CHECK(aZ > 0.5);  // KG level only disappears above its critical coupling
        }
    }
}

TEST_CASE("sweep: 2P model energy falls monotonically with the coupling") {
    const RunResult r =
        run_cli("sweep --n 2 --l 1 --min 0.01 --max 1.2 --steps 40 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 41);
    double prev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(!rows[i][2].empty());  // 1.2 is still below the 2P critical coupling
        const double e_model = std::stod(rows[i][2]);
        CHECK(e_model < prev);
        prev = e_model;
    }
}

TEST_CASE("CSV cells carry 12 significant digits in scientific notation") {
    const RunResult r = run_cli("sweep --n 1 --l 0 --min 0.1 --max 0.2 --steps 2 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (std::string cell : rows[i]) {
            if (cell.empty()) continue;
            if (cell[0] == '-') cell.erase(0, 1);
            // d.dddddddddddE[sign]dd, C locale
            CHECK(cell.size() >= 17);
            CHECK(cell[1] == '.');
            CHECK(cell.find('e') == 13);
        }
}

TEST_CASE("sweep: rows past the model critical coupling keep empty cells") {
    const RunResult r = run_cli("sweep --n 1 --l 0 --min 0.48 --max 0.52 --steps 5 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    bool saw_empty_model = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(!rows[i][3].empty());  // Schrodinger column always present
        if (rows[i][1].empty()) {
            saw_empty_model = true;
            CHECK(rows[i][2].empty());
        }
    }
    CHECK(saw_empty_model);
}

TEST_CASE("sweep: byte-identical reruns, independent of thread count") {
    const std::string flags = "sweep --n 2 --l 1 --min 0.05 --max 1.0 --steps 24";
    const RunResult a = run_cli(flags + " --threads 1 2>/dev/null");
    const RunResult b = run_cli(flags + " --threads 4 2>/dev/null");
    const RunResult c = run_cli(flags + " --threads 4 2>/dev/null");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(b.out == c.out);
    CHECK(!a.out.empty());
}

TEST_CASE("sweep: json format carries nulls for missing levels") {
    const RunResult r =
        run_cli("sweep --n 1 --l 0 --min 0.45 --max 0.55 --steps 3 --format json 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const json arr = json::parse(r.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 3);
    CHECK(arr[2]["epsilon"].is_null());
    CHECK(arr[0]["epsilon"].is_number());
}

TEST_CASE("rhs-curve: two diagonal crossings at alphaZ = 0.3") {
    const RunResult r = run_cli("rhs-curve --n 1 --l 0 --alphaZ 0.3 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 513);
    CHECK(rows[0] == std::vector<std::string>{"eta", "g_eta"});
    int crossings = 0;
    double prev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double eta = std::stod(rows[i][0]);
        const double g = std::stod(rows[i][1]);
        const double d = g - eta;
        if (i > 1 && std::signbit(d) != std::signbit(prev)) ++crossings;
        prev = d;
    }
    CHECK(crossings == 2);
}

TEST_CASE("rhs-curve: free-coupling limit hugs one") {
    const RunResult r =
        run_cli("rhs-curve --n 1 --l 0 --alphaZ 1e-8 --eta-min 0.2 --eta-max 1.0 --steps 9 "
                "2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("epsilon-sweep: column ratios and critical cutoffs") {
    const RunResult r =
        run_cli("epsilon-sweep --min 0.005 --max 0.53 --steps 22 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 23);
    CHECK(rows[0] == std::vector<std::string>{"alphaZ", "eps_10", "eps_20", "eps_21"});
    // first row sits deep in the perturbative regime: ratios of the cubic-law
    // constants 2 : 1/4 : 1/12 are 8 and 24
    const double e10 = std::stod(rows[1][1]);
    const double e20 = std::stod(rows[1][2]);
    const double e21 = std::stod(rows[1][3]);
    CHECK(e10 / e20 == doctest::Approx(8.0).epsilon(0.01));
    CHECK(e10 / e21 == doctest::Approx(24.0).epsilon(0.01));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double aZ = std::stod(rows[i][0]);
        if (rows[i][1].empty()) {
            CHECK(aZ > 0.5101);  // 1S column ends at its critical coupling
        } else if (!rows[i][2].empty() && !rows[i][3].empty()) {
            CHECK(std::stod(rows[i][1]) > std::stod(rows[i][2]));
            CHECK(std::stod(rows[i][2]) > std::stod(rows[i][3]));
        }
    }
    CHECK(rows[22][1].empty());  // 0.53 lies beyond the 1S critical coupling
}

TEST_CASE("critical: ground-state boundary as JSON") {
    const RunResult r = run_cli("critical --n 1 --l 0 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["alphaZ_c"].get<double>() - 0.510107) < 1e-5);
}

TEST_CASE("ground-state: window assignments over the coupling axis") {
    const RunResult r = run_cli("ground-state --min 0.3 --max 1.5 --steps 5 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"alphaZ", "ground_n", "ground_l"});
    auto state = [&](int i) { return rows[i][1] + "," + rows[i][2]; };
    CHECK(state(1) == "1,0");      // 0.3
    CHECK(state(2) == "2,0");      // 0.6
    CHECK(state(3) == "2,1");      // 0.9
    CHECK(state(4) == "2,1");      // 1.2
    CHECK(state(5) == "none,none");  // 1.5
}

TEST_CASE("output lands in the requested file, byte-stable across runs") {
    const fs::path f1 = temp_file("sweep1.csv");
    const fs::path f2 = temp_file("sweep2.csv");
    const std::string flags = "epsilon-sweep --min 0.05 --max 0.4 --steps 8 --output ";
    CHECK(run_cli(flags + f1.string() + " 2>/dev/null").exit_code == 0);
    CHECK(run_cli(flags + f2.string() + " 2>/dev/null").exit_code == 0);
    const std::string c1 = slurp(f1), c2 = slurp(f2);
    CHECK(c1 == c2);
    CHECK(!c1.empty());
    fs::remove(f1);
    fs::remove(f2);
}

TEST_CASE("oracle-check: analytic and shooting paths agree") {
    const RunResult r = run_cli("oracle-check --n 1 --l 0 --alphaZ 0.3 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["agree"] == true);
    CHECK(j["rel_diff_energy"].get<double>() <= 1e-8);
    CHECK(j["abs_diff_epsilon"].get<double>() <= 1e-7);
}

TEST_CASE("oracle-check: 2P state at strong coupling") {
    const RunResult r = run_cli("oracle-check --n 2 --l 1 --alphaZ 0.5 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["agree"] == true);
}

TEST_CASE("oracle-check: both paths report nonexistence above critical") {
    const RunResult r = run_cli("oracle-check --n 1 --l 0 --alphaZ 0.52 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["exists_analytic"] == false);
    CHECK(j["exists_numeric"] == false);
    CHECK(j["agree"] == true);
}

TEST_CASE("help exits cleanly") {
    const RunResult r = run_cli("--help 2>/dev/null");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("solve") != std::string::npos);
    CHECK(r.out.find("oracle-check") != std::string::npos);
}

TEST_CASE("tolerance overrides come from the environment, flags win") {
    const RunResult from_env =
        run_cli("critical --n 1 --l 0 2>/dev/null", "NCATOM_CRIT_TOL=1e-5 ");
    REQUIRE(from_env.exit_code == 0);
    CHECK(std::abs(json::parse(from_env.out)["alphaZ_c"].get<double>() - 0.510107) < 3e-5);
    // a coarse env setting is overridden by a tight flag
    const RunResult flag_wins =
        run_cli("critical --n 1 --l 0 --crit-tol 1e-7 2>/dev/null", "NCATOM_CRIT_TOL=0.03 ");
    REQUIRE(flag_wins.exit_code == 0);
    CHECK(std::abs(json::parse(flag_wins.out)["alphaZ_c"].get<double>() - 0.510107) < 1e-5);
}
