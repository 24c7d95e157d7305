#pragma once

#include <string>
#include <vector>

#include "noma/mdp.hpp"

namespace noma {

/// Lagrangian of a policy's exact evaluation:
/// expected_capacity + lambda * (delta - outage_prob).
double lagrangian(const EvaluationResult& eval, double lambda, double delta);

/// One dual-variable probe: the policy optimal at `lambda`, evaluated
/// exactly. dual_value is the optimal value of the initial state.
struct ProbePoint {
    double lambda = 0.0;
    double outage = 0.0;
    double capacity = 0.0;
    double dual_value = 0.0;
};

struct DualSearchResult {
    double lambda_star = 0.0;
    Policy policy;
    EvaluationResult eval;
    std::vector<ProbePoint> trace;  ///< probes in the order they were made
    bool feasible = false;
};

/// Minimizes the dual variable subject to the outage constraint.
///
/// Probes lambda = 0 first (if already feasible the constraint is slack
/// and 0 is optimal). Otherwise grows an upper bound geometrically from
/// T * max rate of user 2 until a feasible policy appears, then bisects
/// the bracket to width epsilon and returns the feasible (upper) side.
/// If no bound up to 20 doublings is feasible the problem is reported
/// infeasible: feasible == false and the returned policy is the one
/// with the smallest outage seen (the last, largest-lambda probe).
DualSearchResult bisection_search(const ScenarioConfig& cfg, double epsilon,
                                  const ActionTable& table);
DualSearchResult bisection_search(const ScenarioConfig& cfg, double epsilon,
                                  OrderFilter filter);

/// Trace rows as probed. Columns: lambda,outage,capacity,dual_value.
void write_trace_csv(const std::string& path, const std::vector<ProbePoint>& trace);

}  // namespace noma
