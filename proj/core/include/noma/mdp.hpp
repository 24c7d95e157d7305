#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "noma/dynamics.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// An episode state: how many slots are left and how many of user 1's
/// packets are still owed. Terminal states have remaining_slots == 0.
struct State {
    int remaining_slots = 0;   ///< E
    int remaining_packets = 0; ///< Z, in [0, N]

    friend bool operator==(const State&, const State&) = default;
};

/// The finite state space for horizon T and packet count N: the initial
/// state (T, N) plus every (E, Z) with E in [0, T-1], Z in [0, N].
/// Canonical ordering is by increasing E, then increasing Z, so the
/// T(N+1)+1 states close with the initial one.
class StateSpace {
public:
    StateSpace(int T, int N);

    int horizon() const { return T_; }
    int packet_count() const { return N_; }

    std::size_t size() const { return states_.size(); }
    std::size_t nonterminal_count() const { return size() - static_cast<std::size_t>(N_ + 1); }

    const std::vector<State>& states() const { return states_; }
    State initial_state() const { return State{T_, N_}; }

    static bool is_terminal(State s) { return s.remaining_slots == 0; }

    /// Position of s in the canonical ordering.
    std::size_t index_of(State s) const;

    /// Position of a nonterminal s among the nonterminal states only
    /// (same relative order); used to index policies.
    std::size_t nonterminal_index(State s) const;

private:
    int T_;
    int N_;
    std::vector<State> states_;
};

/// Builds the canonically ordered state list for (T, N).
std::vector<State> build_state_space(int T, int N);

/// State update after a slot that delivered d1 packets to user 1.
/// Pre: s nonterminal (throws std::logic_error otherwise). Overshoot is
/// clamped: delivering more packets than remaining still ends at zero.
State transition(State s, int d1);

/// Per-slot reward split into the part that measures user 2 throughput
/// and the constraint bookkeeping part, so one set of dynamics serves
/// every dual variable: reward(lambda) = capacity + lambda * constraint.
/// The constraint part is 0 while the episode continues, delta - 1 when
/// it ends with packets still owed, and delta when it ends fully served.
struct RewardParts {
    double capacity = 0.0;
    double constraint = 0.0;
};

RewardParts reward_components(State next, int d2, const ScenarioConfig& cfg);

/// An action list together with its precomputed outcome distributions.
/// Built once per scenario and shared read-only across solves; the
/// solvers never touch the channel formulas directly.
struct ActionTable {
    std::vector<Action> actions;
    std::vector<OutcomeDistribution> outcomes;

    static ActionTable build(const ScenarioConfig& cfg, OrderFilter filter);
    static ActionTable build(const ScenarioConfig& cfg, std::vector<Action> actions);

    std::size_t size() const { return actions.size(); }
};

/// State values in canonical state order; terminal entries are 0.
using ValueTable = std::vector<double>;

/// A deterministic mapping from every nonterminal state to an action,
/// indexed by StateSpace::nonterminal_index.
struct Policy {
    std::vector<Action> actions;
};

/// Expected one-step value of taking `a` (with outcome law `dist`) in
/// state `s`: sum over the four outcomes of
/// p * (d2 + lambda * c(s') + values[s']).
double action_value(const StateSpace& space, State s, const Action& a,
                    const OutcomeDistribution& dist, double lambda,
                    const ScenarioConfig& cfg, const ValueTable& values);

struct ValueIterationResult {
    ValueTable values;
    /// Sweeps that changed some value by at least xi; the final
    /// verification sweep (max change < xi) is not counted. The chain
    /// of states is acyclic in E, so this never exceeds the horizon.
    int sweeps = 0;
};

/// Tabular value iteration: repeated in-place greedy backups over the
/// nonterminal states in canonical order until the largest change in a
/// sweep drops below xi.
ValueIterationResult value_iteration(const ScenarioConfig& cfg, const ActionTable& table,
                                     double lambda, double xi);

/// Exact finite-horizon solve: one backup pass in increasing
/// remaining-slot order. Equals value_iteration's fixed point.
ValueTable backward_induction(const ScenarioConfig& cfg, const ActionTable& table,
                              double lambda);

/// Greedy policy from an optimal value table. Ties go to the lowest
/// action index in the table's ordering, so results are reproducible.
Policy extract_policy(const ScenarioConfig& cfg, const ActionTable& table,
                      double lambda, const ValueTable& values);

/// Exact performance of a policy from the initial state.
struct EvaluationResult {
    double expected_capacity = 0.0;  ///< E[sum of d2 over the episode], packets
    double outage_prob = 0.0;        ///< P{user 1 ends with packets still owed}
    double delta = 0.0;              ///< threshold carried over from the scenario

    double lagrangian_at(double lambda) const {
        return expected_capacity + lambda * (delta - outage_prob);
    }
};

/// Propagates the exact state distribution slot by slot from the
/// initial state (no sampling). expected_capacity accumulates the d2
/// means; outage_prob is the terminal mass with packets still owed.
EvaluationResult evaluate_policy_exact(const ScenarioConfig& cfg, const Policy& policy);

/// Writes the policy (and per-state values) for all nonterminal states
/// in canonical order. Columns: E,Z,order,v1,v2,r1,r2,value.
void write_policy_csv(const std::string& path, const ScenarioConfig& cfg,
                      const Policy& policy, const ValueTable& values);

/// Reads a policy written by write_policy_csv and validates it against
/// the scenario: every nonterminal state must appear exactly once and
/// every action must come from the scenario's grid. Throws ConfigError
/// naming the offending state or row.
Policy read_policy_csv(const std::string& path, const ScenarioConfig& cfg);

}  // namespace noma
