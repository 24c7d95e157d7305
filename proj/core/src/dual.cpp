#include "noma/dual.hpp"

#include <fstream>
#include <stdexcept>

#include "text_util.hpp"

namespace noma {

using detail::format_double;

double lagrangian(const EvaluationResult& eval, double lambda, double delta) {
    return eval.expected_capacity + lambda * (delta - eval.outage_prob);
}

namespace {

struct Probe {
    Policy policy;
    EvaluationResult eval;
    double dual_value = 0.0;
};

Probe solve_at(const ScenarioConfig& cfg, const ActionTable& table, double lambda,
               std::vector<ProbePoint>& trace) {
    Probe probe;
    const ValueTable values = backward_induction(cfg, table, lambda);
    probe.policy = extract_policy(cfg, table, lambda, values);
    probe.eval = evaluate_policy_exact(cfg, probe.policy);
    probe.dual_value = values[StateSpace(cfg.T, cfg.N).index_of(State{cfg.T, cfg.N})];
    trace.push_back(ProbePoint{lambda, probe.eval.outage_prob,
                               probe.eval.expected_capacity, probe.dual_value});
    return probe;
}

DualSearchResult make_result(double lambda, Probe probe, std::vector<ProbePoint> trace,
                             bool feasible) {
    DualSearchResult result;
    result.lambda_star = lambda;
    result.policy = std::move(probe.policy);
    result.eval = probe.eval;
    result.trace = std::move(trace);
    result.feasible = feasible;
    return result;
}

}  // namespace

DualSearchResult bisection_search(const ScenarioConfig& cfg, double epsilon,
                                  const ActionTable& table) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("bisection_search requires epsilon > 0");

    std::vector<ProbePoint> trace;

    // Constraint slack at lambda = 0: no search needed.
    Probe probe = solve_at(cfg, table, 0.0, trace);
    if (probe.eval.outage_prob <= cfg.delta) {
        return make_result(0.0, std::move(probe), std::move(trace), true);
    }

    // Grow the upper bound until the constraint binds the policy. Beyond
    // T * max(rate_set_2) the multiplier outweighs any capacity
    // difference, so feasibility appears at the first doubling that can
    // deliver it at all.
    double lo = 0.0;
    double hi = static_cast<double>(cfg.T) * cfg.max_rate_2();
    if (hi <= 0.0) hi = 1.0;
    probe = solve_at(cfg, table, hi, trace);
    for (int doublings = 0; probe.eval.outage_prob > cfg.delta && doublings < 20; ++doublings) {
        lo = hi;
        hi *= 2.0;
        probe = solve_at(cfg, table, hi, trace);
    }
    if (probe.eval.outage_prob > cfg.delta) {
        // No multiplier achieves the outage target; report the
        // lowest-outage policy found instead of failing.
        return make_result(hi, std::move(probe), std::move(trace), false);
    }

    // Bisect; `probe` always holds the solution at the feasible end `hi`.
    while (hi - lo >= epsilon) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
        Probe mid_probe = solve_at(cfg, table, mid, trace);
        if (mid_probe.eval.outage_prob > cfg.delta) {
            lo = mid;
        } else {
            hi = mid;
            probe = std::move(mid_probe);
        }
    }
    return make_result(hi, std::move(probe), std::move(trace), true);
}

DualSearchResult bisection_search(const ScenarioConfig& cfg, double epsilon,
                                  OrderFilter filter) {
    return bisection_search(cfg, epsilon, ActionTable::build(cfg, filter));
}

void write_trace_csv(const std::string& path, const std::vector<ProbePoint>& trace) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path + ": cannot open for writing");
    out << "lambda,outage,capacity,dual_value\n";
    for (const ProbePoint& p : trace) {
        out << format_double(p.lambda) << ',' << format_double(p.outage) << ','
            << format_double(p.capacity) << ',' << format_double(p.dual_value) << "\n";
    }
}

}  // namespace noma
