// Command-line front end: exposes the solvers as subcommands and emits
// deterministic CSV/JSON suitable for plotting and regression diffing.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ncatom/coulomb.hpp"
#include "ncatom/oracle.hpp"
#include "ncatom/spectrum.hpp"
#include "ncatom/textio.hpp"
#include "ncatom/types.hpp"

namespace {

using ncatom::Coupling;
using ncatom::QuantumNumbers;
using ordered_json = nlohmann::ordered_json;

struct GlobalOptions {
    std::string output;
    std::string format;  // empty = command default
    double quad_tol{1e-12};
    double root_tol{1e-12};
    double crit_tol{1e-7};
    int threads{0};  // 0 = auto
};

ncatom::QuadratureSpec quad_spec(const GlobalOptions& g) {
    return {g.quad_tol, 0.01 * g.quad_tol, 4000};
}

ncatom::EtaSolveOptions eta_options(const GlobalOptions& g) {
    ncatom::EtaSolveOptions opt;
    opt.root_tolerance = g.root_tol;
    opt.quadrature = quad_spec(g);
    return opt;
}

int resolve_threads(int requested, int rows) {
    int t = requested;
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    t = std::clamp(t, 1, 8);
    return std::min(t, rows);
}

// Computes one string per row on a small worker pool; rows land in input
// order, so the emitted file does not depend on the parallelism degree.
std::vector<std::string> parallel_rows(int count, int threads,
                                       const std::function<std::string(int)>& row) {
    std::vector<std::string> rows(count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) rows[i] = row(i);
        return rows;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                rows[i] = row(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> xs(steps);
    for (int i = 0; i < steps; ++i)
        xs[i] = (i == steps - 1) ? hi : lo + i * (hi - lo) / (steps - 1);
    return xs;
}

int emit(const std::string& content, const GlobalOptions& g) {
    if (g.output.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return 0;
    }
    std::ofstream out(g.output, std::ios::binary);
    if (!out) {
        std::cerr << "{\"error\": \"cannot open output file\"}\n";
        return 1;
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    return out ? 0 : 1;
}

int usage_error(const std::string& message) {
    ordered_json j;
    j["error"] = message;
    std::cerr << j.dump() << "\n";
    return 1;
}

std::string sig(double v) { return ncatom::format_significant(v, 12); }
double rounded(double v) { return ncatom::round_significant(v, 12); }

bool want_json(const GlobalOptions& g, bool json_default) {
    if (g.format.empty()) return json_default;
    return g.format == "json";
}

// ---------------------------------------------------------------------------

int cmd_solve(int n, int l, double alphaZ, const GlobalOptions& g) {
    const QuantumNumbers qn{n, l};
    if (!qn.is_valid()) return usage_error("quantum numbers require n >= 1 and 0 <= l <= n-1");
    if (!(alphaZ > 0.0)) return usage_error("alphaZ must be positive");
    if (!g.format.empty() && g.format != "json") return usage_error("solve emits JSON only");
    try {
        const ncatom::LevelResult level =
            ncatom::solve_level(qn, Coupling{alphaZ}, eta_options(g));
        ordered_json j;
        j["n"] = qn.n;
        j["l"] = qn.l;
        j["alphaZ"] = rounded(alphaZ);
        j["epsilon"] = rounded(level.epsilon);
        j["eta"] = rounded(level.eta);
        j["energy_model"] = rounded(level.energy_model);
        j["energy_schrodinger"] = rounded(level.energy_schrodinger);
        if (level.energy_klein_gordon)
            j["energy_klein_gordon"] = rounded(*level.energy_klein_gordon);
        else
            j["energy_klein_gordon"] = nullptr;
        j["mean_radius"] = rounded(level.mean_radius);
        j["root_count"] = level.root_count;
        j["residual"] = rounded(level.residual);
        return emit(j.dump(2) + "\n", g);
    } catch (const ncatom::NoBoundState& e) {
        ordered_json j;
        j["error"] = "no bound state";
        j["detail"] = e.what();
        std::cerr << j.dump() << "\n";
        return 2;
    }
}

int cmd_sweep(int n, int l, double lo, double hi, int steps, const GlobalOptions& g) {
    const QuantumNumbers qn{n, l};
    if (!qn.is_valid()) return usage_error("quantum numbers require n >= 1 and 0 <= l <= n-1");
    if (!(lo > 0.0) || !(lo < hi) || steps < 2)
        return usage_error("sweep requires 0 < min < max and steps >= 2");
    const auto xs = linspace(lo, hi, steps);
    const auto opt = eta_options(g);
    std::atomic<int> missing{0};

    struct Row {
        double aZ;
        std::optional<double> eps, e_model, e_kg;
        double e_s;
    };
    std::vector<Row> rows(steps);
    auto compute = [&](int i) -> std::string {
        Row row;
        row.aZ = xs[i];
        const Coupling c{xs[i]};
        row.e_s = ncatom::energy_schrodinger(qn, c);
        try {
            row.e_kg = ncatom::energy_klein_gordon(qn, c);
        } catch (const ncatom::BeyondCriticalCoupling&) {
        }
        try {
            const ncatom::EtaSolution sol = ncatom::solve_eta(qn, c, opt);
            row.eps = sol.epsilon;
            row.e_model = ncatom::energy_model(qn, c, sol.epsilon);
        } catch (const ncatom::NoBoundState&) {
            missing.fetch_add(1);
        }
        rows[i] = row;
        return {};
    };
    parallel_rows(steps, resolve_threads(g.threads, steps), compute);

    std::string content;
    if (want_json(g, false)) {
        ordered_json arr = ordered_json::array();
        for (const Row& r : rows) {
            ordered_json j;
            j["alphaZ"] = rounded(r.aZ);
            j["epsilon"] = r.eps ? ordered_json(rounded(*r.eps)) : ordered_json(nullptr);
            j["energy_model"] =
                r.e_model ? ordered_json(rounded(*r.e_model)) : ordered_json(nullptr);
            j["energy_schrodinger"] = rounded(r.e_s);
            j["energy_klein_gordon"] =
                r.e_kg ? ordered_json(rounded(*r.e_kg)) : ordered_json(nullptr);
            arr.push_back(j);
        }
        content = arr.dump(2) + "\n";
    } else {
        content = "alphaZ,epsilon,energy_model,energy_schrodinger,energy_klein_gordon\n";
        for (const Row& r : rows) {
            content += sig(r.aZ);
            content += ',';
            content += r.eps ? sig(*r.eps) : "";
            content += ',';
            content += r.e_model ? sig(*r.e_model) : "";
            content += ',';
            content += sig(r.e_s);
            content += ',';
            content += r.e_kg ? sig(*r.e_kg) : "";
            content += '\n';
        }
    }
    const int rc = emit(content, g);
    if (missing > 0)
        std::cerr << "warning: " << missing << " rows without a model solution\n";
    return rc;
}

int cmd_rhs_curve(int n, int l, double alphaZ, double eta_min, double eta_max, int steps,
                  const GlobalOptions& g) {
    const QuantumNumbers qn{n, l};
    if (!qn.is_valid()) return usage_error("quantum numbers require n >= 1 and 0 <= l <= n-1");
    if (!(alphaZ > 0.0)) return usage_error("alphaZ must be positive");
    if (!(eta_min > 0.0) || !(eta_min < eta_max) || eta_max > 1.0 || steps < 2)
        return usage_error("eta range must satisfy 0 < min < max <= 1 with steps >= 2");
    const auto xs = linspace(eta_min, eta_max, steps);
    const auto spec = quad_spec(g);
    std::vector<double> gs(steps);
    parallel_rows(steps, resolve_threads(g.threads, steps), [&](int i) -> std::string {
        gs[i] = ncatom::rhs_eta(xs[i], qn, Coupling{alphaZ}, spec);
        return {};
    });
    std::string content;
    if (want_json(g, false)) {
        ordered_json arr = ordered_json::array();
        for (int i = 0; i < steps; ++i)
            arr.push_back({{"eta", rounded(xs[i])}, {"g_eta", rounded(gs[i])}});
        content = arr.dump(2) + "\n";
    } else {
        content = "eta,g_eta\n";
        for (int i = 0; i < steps; ++i) content += sig(xs[i]) + "," + sig(gs[i]) + "\n";
    }
    return emit(content, g);
}

int cmd_epsilon_sweep(double lo, double hi, int steps, const std::vector<std::string>& raw_states,
                      const GlobalOptions& g) {
    if (!(lo > 0.0) || !(lo < hi) || steps < 2)
        return usage_error("epsilon-sweep requires 0 < min < max and steps >= 2");
    std::vector<QuantumNumbers> states;
    if (raw_states.empty()) {
        states = {{1, 0}, {2, 0}, {2, 1}};
    } else {
        for (const std::string& s : raw_states) {
            int sn = 0, sl = -1;
            if (std::sscanf(s.c_str(), "%d,%d", &sn, &sl) != 2 ||
                !QuantumNumbers{sn, sl}.is_valid())
                return usage_error("state must be 'n,l' with n >= 1 and 0 <= l <= n-1");
            states.push_back({sn, sl});
        }
    }
    const auto xs = linspace(lo, hi, steps);
    const auto opt = eta_options(g);
    std::vector<std::vector<std::optional<double>>> eps(steps);
    parallel_rows(steps, resolve_threads(g.threads, steps), [&](int i) -> std::string {
        eps[i].resize(states.size());
        for (std::size_t s = 0; s < states.size(); ++s) {
            try {
                eps[i][s] = ncatom::solve_eta(states[s], Coupling{xs[i]}, opt).epsilon;
            } catch (const ncatom::NoBoundState&) {
            }
        }
        return {};
    });
    auto column = [&](const QuantumNumbers& qn) {
        return "eps_" + std::to_string(qn.n) + std::to_string(qn.l);
    };
    std::string content;
    if (want_json(g, false)) {
        ordered_json arr = ordered_json::array();
        for (int i = 0; i < steps; ++i) {
            ordered_json j;
            j["alphaZ"] = rounded(xs[i]);
            for (std::size_t s = 0; s < states.size(); ++s)
                j[column(states[s])] =
                    eps[i][s] ? ordered_json(rounded(*eps[i][s])) : ordered_json(nullptr);
            arr.push_back(j);
        }
        content = arr.dump(2) + "\n";
    } else {
        content = "alphaZ";
        for (const auto& st : states) content += "," + column(st);
        content += '\n';
        for (int i = 0; i < steps; ++i) {
            content += sig(xs[i]);
            for (std::size_t s = 0; s < states.size(); ++s) {
                content += ',';
                if (eps[i][s]) content += sig(*eps[i][s]);
            }
            content += '\n';
        }
    }
    return emit(content, g);
}

int cmd_critical(int n, int l, const GlobalOptions& g) {
    const QuantumNumbers qn{n, l};
    if (!qn.is_valid()) return usage_error("quantum numbers require n >= 1 and 0 <= l <= n-1");
    if (!g.format.empty() && g.format != "json") return usage_error("critical emits JSON only");
    const Coupling crit = ncatom::critical_coupling(qn, g.crit_tol, quad_spec(g));
    ordered_json j;
    j["n"] = qn.n;
    j["l"] = qn.l;
    j["alphaZ_c"] = rounded(crit.alphaZ);
    return emit(j.dump(2) + "\n", g);
}

int cmd_ground_state(double lo, double hi, int steps, const GlobalOptions& g) {
    if (!(lo > 0.0) || !(lo < hi) || steps < 2)
        return usage_error("ground-state requires 0 < min < max and steps >= 2");
    const auto xs = linspace(lo, hi, steps);
    const auto opt = eta_options(g);
    std::vector<std::optional<QuantumNumbers>> winners(steps);
    parallel_rows(steps, resolve_threads(g.threads, steps), [&](int i) -> std::string {
        winners[i] = ncatom::ground_state(Coupling{xs[i]}, opt);
        return {};
    });
    std::string content;
    if (want_json(g, false)) {
        ordered_json arr = ordered_json::array();
        for (int i = 0; i < steps; ++i) {
            ordered_json j;
            j["alphaZ"] = rounded(xs[i]);
            j["ground_n"] = winners[i] ? ordered_json(winners[i]->n) : ordered_json(nullptr);
            j["ground_l"] = winners[i] ? ordered_json(winners[i]->l) : ordered_json(nullptr);
            arr.push_back(j);
        }
        content = arr.dump(2) + "\n";
    } else {
        content = "alphaZ,ground_n,ground_l\n";
        for (int i = 0; i < steps; ++i) {
            content += sig(xs[i]);
            if (winners[i])
                content += "," + std::to_string(winners[i]->n) + "," +
                           std::to_string(winners[i]->l);
            else
                content += ",none,none";
            content += '\n';
        }
    }
    return emit(content, g);
}

int cmd_oracle_check(int n, int l, double alphaZ, const GlobalOptions& g) {
    const QuantumNumbers qn{n, l};
    if (!qn.is_valid()) return usage_error("quantum numbers require n >= 1 and 0 <= l <= n-1");
    if (!(alphaZ > 0.0)) return usage_error("alphaZ must be positive");
    if (!g.format.empty() && g.format != "json")
        return usage_error("oracle-check emits JSON only");
    const Coupling c{alphaZ};

    bool exists_analytic = true;
    double eps_a = 0.0, energy_a = 0.0;
    try {
        const ncatom::EtaSolution sol = ncatom::solve_eta(qn, c, eta_options(g));
        eps_a = sol.epsilon;
        energy_a = ncatom::energy_model(qn, c, sol.epsilon);
    } catch (const ncatom::NoBoundState&) {
        exists_analytic = false;
    }

    bool exists_numeric = true;
    double eps_n = 0.0, energy_n = 0.0;
    try {
        // First pass sizes the problem from scratch; second pass regrids at
        // the converged eta so the resolution matches the actual state.
        const ncatom::PotentialSpec pot = ncatom::coulomb_potential(c);
        const ncatom::SelfConsistentResult coarse =
            ncatom::self_consistent_solve(qn, pot, ncatom::default_grid(qn, c, 1.0));
        const ncatom::SelfConsistentResult fine = ncatom::self_consistent_solve(
            qn, pot, ncatom::default_grid(qn, c, 1.0 - coarse.epsilon));
        eps_n = fine.epsilon;
        energy_n = fine.eigenstate.eigenvalue;
    } catch (const ncatom::NoBoundState&) {
        exists_numeric = false;
    } catch (const ncatom::IterationDiverged&) {
        exists_numeric = false;
    }

    ordered_json j;
    j["n"] = qn.n;
    j["l"] = qn.l;
    j["alphaZ"] = rounded(alphaZ);
    j["exists_analytic"] = exists_analytic;
    j["exists_numeric"] = exists_numeric;
    bool agree = false;
    if (exists_analytic && exists_numeric) {
        const double abs_deps = std::abs(eps_n - eps_a);
        const double rel_de = std::abs(energy_n / energy_a - 1.0);
        j["epsilon_analytic"] = rounded(eps_a);
        j["epsilon_numeric"] = rounded(eps_n);
        j["energy_analytic"] = rounded(energy_a);
        j["energy_numeric"] = rounded(energy_n);
        j["rel_diff_energy"] = rounded(rel_de);
        j["rel_diff_epsilon"] = rounded(eps_a != 0.0 ? abs_deps / std::abs(eps_a) : 0.0);
        j["abs_diff_epsilon"] = rounded(abs_deps);
        agree = abs_deps <= 1e-7 && rel_de <= 1e-8;
    } else {
        j["epsilon_analytic"] = exists_analytic ? ordered_json(rounded(eps_a)) : nullptr;
        j["epsilon_numeric"] = exists_numeric ? ordered_json(rounded(eps_n)) : nullptr;
        j["energy_analytic"] = exists_analytic ? ordered_json(rounded(energy_a)) : nullptr;
        j["energy_numeric"] = exists_numeric ? ordered_json(rounded(energy_n)) : nullptr;
        agree = (exists_analytic == exists_numeric);
    }
    j["agree"] = agree;
    const int rc = emit(j.dump(2) + "\n", g);
    return rc != 0 ? rc : (agree ? 0 : 3);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-consistent two-particle model with noncommuting operators: "
                 "bound levels, noncommutativity parameters, and critical couplings "
                 "of a hydrogenlike atom"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--output", g.output, "Write to this file instead of standard output");
    app.add_option("--format", g.format, "Output format (csv or json)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--quad-tol", g.quad_tol, "Relative quadrature tolerance")
        ->envname("NCATOM_QUAD_TOL");
    app.add_option("--root-tol", g.root_tol, "Root bracket width tolerance")
        ->envname("NCATOM_ROOT_TOL");
    app.add_option("--crit-tol", g.crit_tol, "Critical-coupling bisection tolerance")
        ->envname("NCATOM_CRIT_TOL");
    app.add_option("--threads", g.threads, "Worker threads for sweeps (0 = auto)")
        ->envname("NCATOM_THREADS");

    int n = 1, l = 0, steps = 50, rhs_steps = 512;
    double alphaZ = 0.0, lo = 0.0, hi = 0.0;
    double eta_min = 0.01, eta_max = 1.0;
    std::vector<std::string> raw_states;
    int rc = 0;

    auto* solve = app.add_subcommand("solve", "Solve one (n, l) level at a coupling");
    solve->fallthrough();
    solve->add_option("--n", n, "Principal quantum number")->required();
    solve->add_option("--l", l, "Orbital quantum number")->required();
    solve->add_option("--alphaZ", alphaZ, "Interaction constant alphaZ")->required();
    solve->callback([&] { rc = cmd_solve(n, l, alphaZ, g); });

    auto* sweep = app.add_subcommand("sweep", "Level energies over a coupling range (CSV)");
    sweep->fallthrough();
    sweep->add_option("--n", n)->required();
    sweep->add_option("--l", l)->required();
    sweep->add_option("--min", lo, "Range start")->required();
    sweep->add_option("--max", hi, "Range end")->required();
    sweep->add_option("--steps", steps, "Number of rows (default 50)");
    sweep->callback([&] { rc = cmd_sweep(n, l, lo, hi, steps, g); });

    auto* rhs = app.add_subcommand("rhs-curve",
                                   "Self-consistency right-hand side g(eta) on a grid (CSV)");
    rhs->fallthrough();
    rhs->add_option("--n", n)->required();
    rhs->add_option("--l", l)->required();
    rhs->add_option("--alphaZ", alphaZ)->required();
    rhs->add_option("--eta-min", eta_min, "Grid start (default 0.01)");
    rhs->add_option("--eta-max", eta_max, "Grid end (default 1.0)");
    rhs->add_option("--steps", rhs_steps, "Number of rows (default 512)");
    rhs->callback([&] { rc = cmd_rhs_curve(n, l, alphaZ, eta_min, eta_max, rhs_steps, g); });

    auto* esweep = app.add_subcommand(
        "epsilon-sweep", "Noncommutativity parameters per state over a coupling range (CSV)");
    esweep->fallthrough();
    esweep->add_option("--min", lo)->required();
    esweep->add_option("--max", hi)->required();
    esweep->add_option("--steps", steps, "Number of rows (default 50)");
    esweep->add_option("--state", raw_states,
                       "State as 'n,l' (repeatable; default 1,0 2,0 2,1)");
    esweep->callback([&] { rc = cmd_epsilon_sweep(lo, hi, steps, raw_states, g); });

    auto* crit = app.add_subcommand("critical", "Critical coupling of one state (JSON)");
    crit->fallthrough();
    crit->add_option("--n", n)->required();
    crit->add_option("--l", l)->required();
    crit->callback([&] { rc = cmd_critical(n, l, g); });

    auto* ground = app.add_subcommand("ground-state",
                                      "Ground-state classification over a coupling range (CSV)");
    ground->fallthrough();
    ground->add_option("--min", lo)->required();
    ground->add_option("--max", hi)->required();
    ground->add_option("--steps", steps, "Number of rows (default 50)");
    ground->callback([&] { rc = cmd_ground_state(lo, hi, steps, g); });

    auto* oracle = app.add_subcommand(
        "oracle-check", "Cross-check the analytic level against the shooting solver (JSON)");
    oracle->fallthrough();
    oracle->add_option("--n", n)->required();
    oracle->add_option("--l", l)->required();
    oracle->add_option("--alphaZ", alphaZ)->required();
    oracle->callback([&] { rc = cmd_oracle_check(n, l, alphaZ, g); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json j;
        j["error"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return rc;
}
