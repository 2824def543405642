#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kprice/combination.hpp"
#include "kprice/manifest.hpp"
#include "kprice/payoff.hpp"
#include "kprice/simulate.hpp"

namespace {

using namespace kprice;

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("short write to " + path);
}

PaymentRule make_payment(int n, int k, const std::string& alphas_path) {
    if (k > 0 && !alphas_path.empty()) {
        throw invalid_argument_error("pass either --k or --alphas, not both");
    }
    if (k > 0) return KPrice{k};
    if (alphas_path.empty()) throw invalid_argument_error("need --k or --alphas");
    std::ifstream in(alphas_path);
    if (!in) throw io_error("cannot open coefficient file: " + alphas_path);
    nlohmann::json j;
    in >> j;
    auto [file_n, cv] = CoefficientVector::from_json(j);
    if (file_n != n) {
        throw invalid_argument_error("coefficient file says n=" + std::to_string(file_n) +
                                     " but --n is " + std::to_string(n));
    }
    return cv;
}

Strategy resolve_strategy(const std::string& name, const AuctionSpec& spec) {
    if (name == "equilibrium") {
        if (!spec.is_kprice()) {
            throw invalid_argument_error(
                "no closed-form equilibrium for combination rules; use --candidate truthful "
                "or a strategy CSV");
        }
        return solve_closed_form(spec);
    }
    if (name == "truthful") return Strategy::truthful(spec.valuation);
    return Strategy::load_csv(name);
}

struct EquilibriumArgs {
    std::string dist, out, report, formula = "leibniz";
    int n = 0, k = 0, grid = 2049;
};

int cmd_equilibrium(const EquilibriumArgs& a) {
    AuctionSpec spec{a.n, KPrice{a.k}, Distribution::parse(a.dist)};
    Strategy strategy = a.formula == "leibniz"       ? solve_closed_form(spec)
                        : a.formula == "three-price" ? three_price_formula(spec)
                        : a.formula == "four-price"  ? four_price_formula(spec)
                                                     : throw invalid_argument_error(
                                                           "unknown --formula '" + a.formula + "'");
    strategy.save_csv(a.out, a.grid);
    MonotonicityReport mono = check_existence(strategy, a.grid);
    for (const auto& note : spec.notes()) mono.notes.push_back(note);

    std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
    write_json(report_path, nlohmann::json{{"n", a.n},
                                           {"payment", spec.payment_json()},
                                           {"distribution", spec.valuation.descriptor()},
                                           {"strategy", strategy.descriptor()},
                                           {"monotonicity", mono.to_json()}});

    RunManifest manifest;
    manifest.command = "equilibrium";
    manifest.parameters = {{"dist", a.dist}, {"n", a.n},         {"k", a.k},
                           {"grid", a.grid}, {"formula", a.formula}, {"out", a.out},
                           {"report", report_path}};
    manifest.add_output(a.out);
    manifest.add_output(report_path);
    manifest.write(a.out + ".manifest.json");

    if (!mono.increasing) {
        std::cerr << "equilibrium: bid function is not strictly increasing on the grid\n";
        return 2;
    }
    return 0;
}

struct VerifyArgs {
    std::string dist, alphas, candidate, out;
    int n = 0, k = 0, grid_points = 19;
    double gain_tol = 1e-5;
};

int cmd_verify(const VerifyArgs& a) {
    Distribution d = Distribution::parse(a.dist);
    AuctionSpec spec{a.n, make_payment(a.n, a.k, a.alphas), d};
    spec.validate();
    std::string candidate = a.candidate;
    if (candidate.empty()) candidate = spec.is_kprice() ? "equilibrium" : "truthful";

    RunManifest manifest;
    manifest.command = "verify";
    manifest.parameters = {{"dist", a.dist},     {"n", a.n},
                           {"k", a.k},           {"alphas", a.alphas},
                           {"candidate", candidate}, {"grid_points", a.grid_points},
                           {"gain_tol", a.gain_tol}, {"out", a.out}};

    bool passed;
    if (!spec.is_kprice() && candidate == "truthful") {
        TruthfulnessOptions opts;
        opts.gain_tol = a.gain_tol;
        TruthfulnessReport rep = verify_truthfulness(a.n, spec.coefficients(), d, opts);
        nlohmann::json j = rep.to_json();
        j["distribution"] = d.descriptor();
        write_json(a.out, j);
        passed = rep.truthful;
        std::cout << (passed ? "truthful" : "not truthful")
                  << ": max deviation gain " << format_double(rep.best_response_check.max_gain)
                  << ", max relative residual "
                  << format_double(rep.max_relative_integral_residual) << '\n';
    } else {
        Strategy cand = resolve_strategy(candidate, spec);
        EquilibriumReport rep =
            verify_equilibrium(spec, cand, default_value_grid(d, a.grid_points), a.gain_tol);
        nlohmann::json j = rep.to_json();
        j["n"] = a.n;
        j["payment"] = spec.payment_json();
        j["distribution"] = d.descriptor();
        j["candidate"] = cand.descriptor();
        write_json(a.out, j);
        passed = rep.passed;
        std::cout << (passed ? "equilibrium holds" : "equilibrium violated")
                  << ": max deviation gain " << format_double(rep.max_gain) << " (tolerance "
                  << format_double(a.gain_tol) << ")\n";
    }
    manifest.add_output(a.out);
    manifest.write(a.out + ".manifest.json");
    return passed ? 0 : 2;
}

struct SimulateArgs {
    std::string dist, alphas, strategy = "equilibrium", trace, deviate_strategy, out;
    int n = 0, k = 0, shards = 16, threads = 0, deviate_bidder = -1;
    long long rounds = 0, trace_limit = 100000;
    unsigned long long seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    AuctionSpec spec{a.n, make_payment(a.n, a.k, a.alphas), Distribution::parse(a.dist)};
    spec.validate();
    SimulationConfig config{spec,     {resolve_strategy(a.strategy, spec)},
                            a.rounds, a.seed,
                            a.shards, a.threads,
                            {},       a.trace,
                            a.trace_limit};
    if ((a.deviate_bidder >= 0) != !a.deviate_strategy.empty()) {
        throw invalid_argument_error("--deviate-bidder and --deviate-strategy go together");
    }
    if (a.deviate_bidder >= 0) {
        config.deviation = Deviation{a.deviate_bidder, resolve_strategy(a.deviate_strategy, spec)};
    }

    SimulationReport rep = run_simulation(config);
    nlohmann::json j = rep.to_json();
    j["n"] = a.n;
    j["payment"] = spec.payment_json();
    j["distribution"] = spec.valuation.descriptor();
    j["strategy"] = config.strategies[0].descriptor();
    write_json(a.out, j);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.parameters = {{"dist", a.dist},
                           {"n", a.n},
                           {"k", a.k},
                           {"alphas", a.alphas},
                           {"strategy", a.strategy},
                           {"rounds", a.rounds},
                           {"shards", a.shards},
                           {"trace", a.trace},
                           {"trace_limit", a.trace_limit},
                           {"deviate_bidder", a.deviate_bidder},
                           {"deviate_strategy", a.deviate_strategy},
                           {"out", a.out}};
    manifest.seed = a.seed;
    manifest.add_output(a.out);
    if (!a.trace.empty()) manifest.add_output(a.trace);
    manifest.write(a.out + ".manifest.json");

    std::cout << "mean revenue " << format_double(rep.mean_revenue) << " +/- "
              << format_double(rep.revenue_half_width_95) << " over " << rep.rounds
              << " rounds\n";
    return 0;
}

struct CoeffArgs {
    std::string check_dist, out;
    int n = 0, s = 0;
    bool minimize = false;
};

int cmd_truthful_coeffs(const CoeffArgs& a) {
    auto vertices = enumerate_truthful_vertices(a.n, a.s);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& v : vertices) {
        nlohmann::json row{{"alphas", v.alphas},
                           {"uniform_condition_residual", truthful_condition_residual(v, a.n)}};
        if (!a.check_dist.empty()) {
            TruthfulnessReport rep =
                verify_truthfulness(a.n, v, Distribution::parse(a.check_dist));
            row["truthful"] = rep.truthful;
            row["max_deviation_gain"] = rep.best_response_check.max_gain;
        }
        rows.push_back(row);
    }
    nlohmann::json j{{"n", a.n}, {"s", a.s}, {"vertices", rows}};
    if (!a.check_dist.empty()) {
        j["check_distribution"] = Distribution::parse(a.check_dist).descriptor();
    }
    if (a.minimize) j["alpha2_minimizer"] = minimize_alpha2(a.n, a.s).alphas;
    write_json(a.out, j);

    RunManifest manifest;
    manifest.command = "truthful-coeffs";
    manifest.parameters = {{"n", a.n},
                           {"s", a.s},
                           {"minimize_alpha2", a.minimize},
                           {"check_dist", a.check_dist},
                           {"out", a.out}};
    manifest.add_output(a.out);
    manifest.write(a.out + ".manifest.json");
    std::cout << vertices.size() << " vertices written to " << a.out << '\n';
    return 0;
}

struct IdentityArgs {
    std::string out;
    int n_max = 20, pm_max = 20;
};

int cmd_identities(const IdentityArgs& a) {
    bool all_ok = true;
    nlohmann::json rows = nlohmann::json::array();
    long long checks = 0;
    for (int p = 0; p <= a.pm_max; ++p) {
        for (int m = 0; p + m <= a.pm_max; ++m) {
            auto [lhs, rhs] = beta_integral_identity(p, m);
            bool ok = lhs == rhs;
            all_ok = all_ok && ok;
            ++checks;
            if (!ok) rows.push_back({{"identity", "beta_integral"}, {"p", p}, {"m", m}});
        }
    }
    for (int n = 3; n <= a.n_max; ++n) {
        for (int k = 2; k < n; ++k) {
            auto [lhs, rhs] = alternating_sum_identity(n, k);
            bool ok = lhs == rhs;
            all_ok = all_ok && ok;
            ++checks;
            if (!ok) rows.push_back({{"identity", "alternating_sum"}, {"n", n}, {"k", k}});
        }
    }
    std::cout << (all_ok ? "all " : "FAILURES among ") << checks
              << " exact identity checks (beta integral p+m<=" << a.pm_max
              << ", alternating sum n<=" << a.n_max << ")" << (all_ok ? " hold" : "") << '\n';
    if (!a.out.empty()) {
        write_json(a.out, nlohmann::json{{"checks", checks},
                                         {"all_hold", all_ok},
                                         {"failures", rows},
                                         {"pm_max", a.pm_max},
                                         {"n_max", a.n_max}});
        RunManifest manifest;
        manifest.command = "identities";
        manifest.parameters = {{"n_max", a.n_max}, {"pm_max", a.pm_max}, {"out", a.out}};
        manifest.add_output(a.out);
        manifest.write(a.out + ".manifest.json");
    }
    return all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium bidding for k-price and combination-price auctions"};
    app.set_version_flag("--version", kprice::tool_version());
    app.require_subcommand(1);

    EquilibriumArgs eq;
    auto* eq_cmd = app.add_subcommand("equilibrium", "Solve the closed-form bid function");
    eq_cmd->add_option("--dist", eq.dist, "uniform | poly:<alpha> | exp:<rate> | table:<csv>")
        ->required();
    eq_cmd->add_option("--n", eq.n, "Number of bidders")->required();
    eq_cmd->add_option("--k", eq.k, "Price index (winner pays k-th highest bid)")->required();
    eq_cmd->add_option("--grid", eq.grid, "Output grid points");
    eq_cmd->add_option("--formula", eq.formula, "leibniz | three-price | four-price");
    eq_cmd->add_option("--out", eq.out, "Strategy CSV path")->required();
    eq_cmd->add_option("--report", eq.report, "Report JSON path (default <out>.report.json)");

    VerifyArgs vf;
    auto* vf_cmd = app.add_subcommand("verify", "Check a candidate strategy for equilibrium");
    vf_cmd->add_option("--dist", vf.dist, "Valuation distribution")->required();
    vf_cmd->add_option("--n", vf.n, "Number of bidders")->required();
    vf_cmd->add_option("--k", vf.k, "Price index");
    vf_cmd->add_option("--alphas", vf.alphas, "Coefficient vector JSON file");
    vf_cmd->add_option("--candidate", vf.candidate, "equilibrium | truthful | <strategy csv>");
    vf_cmd->add_option("--grid-points", vf.grid_points, "Valuation grid size");
    vf_cmd->add_option("--gain-tol", vf.gain_tol, "Max tolerated deviation gain");
    vf_cmd->add_option("--out", vf.out, "Report JSON path")->required();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo auction runs");
    sim_cmd->add_option("--dist", sim.dist, "Valuation distribution")->required();
    sim_cmd->add_option("--n", sim.n, "Number of bidders")->required();
    sim_cmd->add_option("--k", sim.k, "Price index");
    sim_cmd->add_option("--alphas", sim.alphas, "Coefficient vector JSON file");
    sim_cmd->add_option("--strategy", sim.strategy, "equilibrium | truthful | <strategy csv>");
    sim_cmd->add_option("--rounds", sim.rounds, "Auction rounds")->required();
    sim_cmd->add_option("--seed", sim.seed, "RNG seed (runs are reproducible)")->required();
    sim_cmd->add_option("--shards", sim.shards, "Independent RNG shards");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = hardware)");
    sim_cmd->add_option("--trace", sim.trace, "Per-round trace CSV path");
    sim_cmd->add_option("--trace-limit", sim.trace_limit, "Max traced rounds");
    sim_cmd->add_option("--deviate-bidder", sim.deviate_bidder, "Bidder index to deviate");
    sim_cmd->add_option("--deviate-strategy", sim.deviate_strategy,
                        "Deviation strategy (equilibrium | truthful | csv)");
    sim_cmd->add_option("--out", sim.out, "Report JSON path")->required();

    CoeffArgs co;
    auto* co_cmd = app.add_subcommand("truthful-coeffs",
                                      "Enumerate truthful combination-price weights");
    co_cmd->add_option("--n", co.n, "Number of bidders")->required();
    co_cmd->add_option("--s", co.s, "Number of price weights")->required();
    co_cmd->add_flag("--minimize-alpha2", co.minimize, "Also report the alpha_2 minimizer");
    co_cmd->add_option("--check-dist", co.check_dist,
                       "Verify each vertex against this distribution");
    co_cmd->add_option("--out", co.out, "Result JSON path")->required();

    IdentityArgs id;
    auto* id_cmd = app.add_subcommand("identities", "Exact combinatorial identity checks");
    id_cmd->add_option("--n-max", id.n_max, "Largest n for the alternating sum");
    id_cmd->add_option("--pm-max", id.pm_max, "Largest p+m for the beta integral");
    id_cmd->add_option("--out", id.out, "Optional result JSON path");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(eq_cmd)) return cmd_equilibrium(eq);
        if (app.got_subcommand(vf_cmd)) return cmd_verify(vf);
        if (app.got_subcommand(sim_cmd)) return cmd_simulate(sim);
        if (app.got_subcommand(co_cmd)) return cmd_truthful_coeffs(co);
        if (app.got_subcommand(id_cmd)) return cmd_identities(id);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
