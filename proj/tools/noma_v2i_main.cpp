// Experiment driver for the two-user downlink allocation solver.
//
// Subcommands:
//   solve          bisection on the dual variable; writes policy, trace,
//                  and summary CSVs
//   sweep-lambda   solve the inner problem on a lambda grid per action
//                  filter; one CSV row per (filter, lambda)
//   delta-sweep    random user placements, one constrained solve per
//                  (placement, delta, filter); mean capacities per cell
//   simulate       Monte-Carlo rollout of a stored policy vs its exact
//                  evaluation
//   dump-dynamics  per-action success probabilities and outcome law
//
// Exit codes: 0 success, 1 usage or config error, 2 infeasible problem.
// CSV schemas are documented in docs/csv-schemas.md.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "noma/dual.hpp"
#include "noma/dynamics.hpp"
#include "noma/mdp.hpp"
#include "noma/scenario.hpp"
#include "noma/sim.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

std::string fmt(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

const char* filter_token(noma::OrderFilter f) {
    switch (f) {
        case noma::OrderFilter::Full: return "full";
        case noma::OrderFilter::Order12Only: return "order12";
        case noma::OrderFilter::Order21Only: return "order21";
    }
    return "full";
}

noma::OrderFilter parse_filter(const std::string& s) {
    if (s == "full") return noma::OrderFilter::Full;
    if (s == "order12") return noma::OrderFilter::Order12Only;
    if (s == "order21") return noma::OrderFilter::Order21Only;
    throw CLI::ValidationError("--filter", "expected one of full|order12|order21");
}

std::vector<noma::OrderFilter> parse_filters(const std::vector<std::string>& names) {
    if (names.empty()) {
        return {noma::OrderFilter::Full, noma::OrderFilter::Order12Only,
                noma::OrderFilter::Order21Only};
    }
    std::vector<noma::OrderFilter> out;
    for (const auto& n : names) out.push_back(parse_filter(n));
    return out;
}

std::vector<double> parse_grid(const std::string& csv, const char* flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) {
            try {
                std::size_t used = 0;
                const double v = std::stod(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
                out.push_back(v);
            } catch (const std::exception&) {
                throw CLI::ValidationError(flag, "'" + token + "' is not a number");
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError(flag, "grid must not be empty");
    return out;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw noma::ConfigError(path.string() + ": cannot open for writing");
    return out;
}

// ----- solve ---------------------------------------------------------------

int cmd_solve(const std::string& config_path, double epsilon, const std::string& filter_name,
              const std::string& out_dir) {
    const noma::ScenarioConfig cfg = noma::load_config(config_path);
    const noma::OrderFilter filter = parse_filter(filter_name);

    const noma::DualSearchResult result = noma::bisection_search(cfg, epsilon, filter);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const noma::ValueTable values =
        noma::backward_induction(cfg, noma::ActionTable::build(cfg, filter), result.lambda_star);
    noma::write_policy_csv((dir / "policy.csv").string(), cfg, result.policy, values);
    noma::write_trace_csv((dir / "trace.csv").string(), result.trace);

    {
        auto out = open_out(dir / "summary.csv");
        out << "filter,epsilon,lambda_star,feasible,outage,capacity,probes\n";
        out << filter_token(filter) << ',' << fmt(epsilon) << ',' << fmt(result.lambda_star)
            << ',' << (result.feasible ? 1 : 0) << ',' << fmt(result.eval.outage_prob) << ','
            << fmt(result.eval.expected_capacity) << ',' << result.trace.size() << "\n";
    }

    std::cout << "filter=" << filter_token(filter) << " lambda_star=" << fmt(result.lambda_star)
              << " feasible=" << (result.feasible ? "yes" : "no")
              << " outage=" << fmt(result.eval.outage_prob)
              << " capacity=" << fmt(result.eval.expected_capacity)
              << " probes=" << result.trace.size() << "\n";

    return result.feasible ? kExitOk : kExitInfeasible;
}

// ----- sweep-lambda --------------------------------------------------------

std::vector<double> default_lambda_grid(const noma::ScenarioConfig& cfg, double epsilon,
                                        const std::vector<noma::OrderFilter>& filters) {
    // {0} plus a geometric ladder around T * max rate, far enough out to
    // stand in for "lambda to infinity", plus each filter's lambda*.
    double base = static_cast<double>(cfg.T) * cfg.max_rate_2();
    if (base <= 0.0) base = 1.0;
    std::vector<double> grid{0.0};
    for (int k = -9; k <= 10; ++k) grid.push_back(base * std::exp2(static_cast<double>(k)));
    for (noma::OrderFilter f : filters) {
        grid.push_back(noma::bisection_search(cfg, epsilon, f).lambda_star);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

int cmd_sweep_lambda(const std::string& config_path, const std::string& grid_csv,
                     const std::vector<std::string>& filter_names, double epsilon,
                     const std::string& out_path) {
    const noma::ScenarioConfig cfg = noma::load_config(config_path);
    const std::vector<noma::OrderFilter> filters = parse_filters(filter_names);

    std::vector<double> grid;
    if (grid_csv.empty()) {
        grid = default_lambda_grid(cfg, epsilon, filters);
    } else {
        grid = parse_grid(grid_csv, "--lambda-grid");
        std::sort(grid.begin(), grid.end());
    }

    auto out = open_out(out_path);
    out << "filter,lambda,return,outage,capacity\n";
    for (noma::OrderFilter f : filters) {
        const noma::ActionTable table = noma::ActionTable::build(cfg, f);
        const noma::StateSpace space(cfg.T, cfg.N);
        for (double lambda : grid) {
            const noma::ValueTable values = noma::backward_induction(cfg, table, lambda);
            const noma::Policy policy = noma::extract_policy(cfg, table, lambda, values);
            const noma::EvaluationResult eval = noma::evaluate_policy_exact(cfg, policy);
            out << filter_token(f) << ',' << fmt(lambda) << ','
                << fmt(values[space.index_of(space.initial_state())]) << ','
                << fmt(eval.outage_prob) << ',' << fmt(eval.expected_capacity) << "\n";
        }
    }
    return kExitOk;
}

// ----- delta-sweep ---------------------------------------------------------

int cmd_delta_sweep(const std::string& config_path, const std::string& delta_csv,
                    int realizations, std::uint64_t seed, double epsilon,
                    const std::vector<std::string>& filter_names, const std::string& out_path) {
    noma::ScenarioConfig base = noma::load_config(config_path);
    const std::vector<noma::OrderFilter> filters = parse_filters(filter_names);
    std::vector<double> deltas = parse_grid(delta_csv, "--delta-grid");
    std::sort(deltas.begin(), deltas.end());

    auto out = open_out(out_path);
    out << "filter,delta,mean_capacity,num_feasible,num_infeasible\n";
    for (noma::OrderFilter f : filters) {
        for (double delta : deltas) {
            double capacity_sum = 0.0;
            int feasible = 0;
            int infeasible = 0;
            for (int i = 0; i < realizations; ++i) {
                // Placement i is a function of (seed, i) alone, so every
                // (filter, delta) cell sees the same placements.
                std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
                const double d1 = 10.0 + 90.0 * noma::uniform_unit(rng);
                const double d2 = 10.0 + 90.0 * noma::uniform_unit(rng);

                noma::ScenarioConfig cfg = base;
                cfg.beta1 = 1e-3 / (d1 * d1);
                cfg.beta2 = 1e-3 / (d2 * d2);
                cfg.delta = delta;
                cfg.validate();

                const noma::DualSearchResult result = noma::bisection_search(cfg, epsilon, f);
                if (result.feasible) {
                    capacity_sum += result.eval.expected_capacity;
                    ++feasible;
                } else {
                    ++infeasible;
                }
            }
            const double mean = feasible > 0 ? capacity_sum / feasible : 0.0;
            out << filter_token(f) << ',' << fmt(delta) << ',' << fmt(mean) << ',' << feasible
                << ',' << infeasible << "\n";
        }
    }
    return kExitOk;
}

// ----- simulate ------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& policy_path, double lambda,
                 std::uint64_t episodes, std::uint64_t seed) {
    const noma::ScenarioConfig cfg = noma::load_config(config_path);
    const noma::Policy policy = noma::read_policy_csv(policy_path, cfg);

    const noma::MonteCarloEstimate mc = noma::monte_carlo(cfg, policy, lambda, episodes, seed);
    const noma::EvaluationResult exact = noma::evaluate_policy_exact(cfg, policy);
    const double exact_return = noma::lagrangian(exact, lambda, cfg.delta);

    std::cout << "episodes=" << mc.episodes << " lambda=" << fmt(lambda) << "\n";
    std::cout << "mc_return=" << fmt(mc.mean_return) << " se=" << fmt(mc.se_return) << "\n";
    std::cout << "mc_capacity=" << fmt(mc.mean_capacity) << " se=" << fmt(mc.se_capacity)
              << "\n";
    std::cout << "mc_outage=" << fmt(mc.outage) << " se=" << fmt(mc.se_outage) << "\n";
    std::cout << "exact_return=" << fmt(exact_return)
              << " exact_capacity=" << fmt(exact.expected_capacity)
              << " exact_outage=" << fmt(exact.outage_prob) << "\n";
    const double dev = mc.se_return > 0.0
                           ? (mc.mean_return - exact_return) / mc.se_return
                           : 0.0;
    std::cout << "return_z=" << fmt(dev) << "\n";
    return kExitOk;
}

// ----- dump-dynamics -------------------------------------------------------

int cmd_dump_dynamics(const std::string& config_path, const std::string& filter_name,
                      const std::string& out_path) {
    const noma::ScenarioConfig cfg = noma::load_config(config_path);
    const noma::ActionTable table =
        noma::ActionTable::build(cfg, parse_filter(filter_name));

    auto out = open_out(out_path);
    out << "order,v1,v2,r1,r2,p1,p2,p_11,p_10,p_01,p_00\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const noma::Action& a = table.actions[i];
        const noma::OutcomeDistribution& d = table.outcomes[i];
        const auto [p1, p2] = noma::user_success_probs(cfg, a);
        const noma::PowerPair p = cfg.power_set[static_cast<std::size_t>(a.power_idx)];
        out << (a.order == noma::DecodingOrder::Order12 ? "order12" : "order21") << ','
            << fmt(p.v1) << ',' << fmt(p.v2) << ',' << a.r1 << ',' << a.r2 << ',' << fmt(p1)
            << ',' << fmt(p2) << ',' << fmt(d.p_11) << ',' << fmt(d.p_10) << ',' << fmt(d.p_01)
            << ',' << fmt(d.p_00) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic power, rate, and decoding-order allocation for a "
                 "two-user downlink"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::string config_path;
    std::string out_path;
    std::string filter_name = "full";
    std::vector<std::string> filter_names;
    std::string lambda_grid;
    std::string delta_grid;
    std::string policy_path;
    double epsilon = 1e-3;
    double lambda = 0.0;
    std::uint64_t episodes = 100000;
    std::uint64_t seed = 1;
    int realizations = 1;

    auto* solve = app.add_subcommand("solve", "bisection on the dual variable");
    solve->add_option("--config", config_path, "scenario config file")->required();
    solve->add_option("--epsilon", epsilon, "bisection bracket tolerance");
    solve->add_option("--filter", filter_name, "full|order12|order21");
    solve->add_option("--out", out_path, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep-lambda", "inner solves over a lambda grid");
    sweep->add_option("--config", config_path, "scenario config file")->required();
    sweep->add_option("--lambda-grid", lambda_grid, "comma-separated lambdas (default: built-in grid)");
    sweep->add_option("--filter", filter_names, "repeatable; default all three");
    sweep->add_option("--epsilon", epsilon, "tolerance for the lambda* grid point");
    sweep->add_option("--out", out_path, "output CSV")->required();

    auto* dsweep = app.add_subcommand("delta-sweep", "constrained solves over random placements");
    dsweep->add_option("--config", config_path, "scenario config template")->required();
    dsweep->add_option("--delta-grid", delta_grid, "comma-separated outage thresholds")->required();
    dsweep->add_option("--realizations", realizations, "random placements")
        ->check(CLI::PositiveNumber);
    dsweep->add_option("--seed", seed, "placement seed");
    dsweep->add_option("--epsilon", epsilon, "bisection tolerance");
    dsweep->add_option("--filter", filter_names, "repeatable; default all three");
    dsweep->add_option("--out", out_path, "output CSV")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of a stored policy");
    simulate->add_option("--config", config_path, "scenario config file")->required();
    simulate->add_option("--policy", policy_path, "policy CSV")->required();
    simulate->add_option("--lambda", lambda, "dual variable for the return");
    simulate->add_option("--episodes", episodes, "episode count")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "episode seed");

    auto* dump = app.add_subcommand("dump-dynamics", "per-action outcome probabilities");
    dump->add_option("--config", config_path, "scenario config file")->required();
    dump->add_option("--filter", filter_name, "full|order12|order21");
    dump->add_option("--out", out_path, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(config_path, epsilon, filter_name, out_path);
        if (sweep->parsed())
            return cmd_sweep_lambda(config_path, lambda_grid, filter_names, epsilon, out_path);
        if (dsweep->parsed())
            return cmd_delta_sweep(config_path, delta_grid, realizations, seed, epsilon,
                                   filter_names, out_path);
        if (simulate->parsed())
            return cmd_simulate(config_path, policy_path, lambda, episodes, seed);
        if (dump->parsed()) return cmd_dump_dynamics(config_path, filter_name, out_path);
    } catch (const noma::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
