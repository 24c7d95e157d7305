#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace noma;
using noma_test::baseline_config;
using noma_test::policy_value_oracle;
using noma_test::power_index;
using noma_test::random_policy;
using noma_test::TempDir;

TEST_CASE("state space has the expected size and ordering") {
    const StateSpace space(4, 13);
    CHECK(space.size() == 57);
    CHECK(space.nonterminal_count() == 43);
    CHECK(space.states().front() == State{0, 0});
    CHECK(space.states().back() == State{4, 13});
    CHECK(build_state_space(10, 16).size() == 171);

    const auto tiny = build_state_space(1, 1);
    CHECK(tiny == std::vector<State>{State{0, 0}, State{0, 1}, State{1, 1}});

    // Ordering: increasing E, then increasing Z; indices round-trip.
    for (std::size_t i = 1; i < space.size(); ++i) {
        const State a = space.states()[i - 1];
        const State b = space.states()[i];
        CHECK(std::pair(a.remaining_slots, a.remaining_packets) <
              std::pair(b.remaining_slots, b.remaining_packets));
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        CHECK(space.index_of(space.states()[i]) == i);
    }
    CHECK(space.nonterminal_index(State{1, 0}) == 0);

    CHECK_THROWS_AS(space.index_of(State{4, 0}), std::out_of_range);
    CHECK_THROWS_AS(space.index_of(State{5, 13}), std::out_of_range);
    CHECK_THROWS_AS(space.nonterminal_index(State{0, 3}), std::out_of_range);
}

TEST_CASE("transition clamps at zero and rejects terminal states") {
    CHECK(transition(State{4, 13}, 2) == State{3, 11});
    CHECK(transition(State{1, 1}, 2) == State{0, 0});
    CHECK(transition(State{2, 0}, 0) == State{1, 0});
    CHECK_THROWS_AS(transition(State{0, 5}, 1), std::logic_error);
}

TEST_CASE("reward components follow the terminal bookkeeping") {
    const auto cfg = baseline_config();  // delta = 0.1
    auto parts = reward_components(State{2, 5}, 3, cfg);
    CHECK(parts.capacity == 3.0);
    CHECK(parts.constraint == 0.0);
    parts = reward_components(State{0, 2}, 1, cfg);
    CHECK(parts.capacity == 1.0);
    CHECK(parts.constraint == doctest::Approx(-0.9));
    parts = reward_components(State{0, 0}, 0, cfg);
    CHECK(parts.capacity == 0.0);
    CHECK(parts.constraint == doctest::Approx(0.1));
}

namespace {

// Direct enumeration of the one-slot problem: the optimal value is the
// best single action's expected reward.
double one_slot_oracle(const ScenarioConfig& cfg, double lambda) {
    double best = -1e300;
    for (const Action& a : enumerate_actions(cfg, OrderFilter::Full)) {
        const auto [p1, p2] = user_success_probs(cfg, a);
        const double p_fail = a.r1 >= cfg.N ? 1.0 - p1 : 1.0;
        best = std::max(best, a.r2 * p2 + lambda * (cfg.delta - p_fail));
    }
    return best;
}

// Backward recursion for the delivery failure probability of a policy;
// independent of the library's forward evaluator.
double outage_oracle(const ScenarioConfig& cfg, const Policy& policy) {
    const StateSpace space(cfg.T, cfg.N);
    std::vector<double> fail(space.size(), 0.0);
    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) {
            fail[space.index_of(s)] = s.remaining_packets > 0 ? 1.0 : 0.0;
            continue;
        }
        const Action a = policy.actions[space.nonterminal_index(s)];
        const auto [p1, p2] = user_success_probs(cfg, a);
        (void)p2;
        const State hit = transition(s, a.r1);
        const State miss = transition(s, 0);
        fail[space.index_of(s)] =
            p1 * fail[space.index_of(hit)] + (1.0 - p1) * fail[space.index_of(miss)];
    }
    return fail[space.index_of(space.initial_state())];
}

}  // namespace

TEST_CASE("one-slot horizon matches brute-force action enumeration") {
    for (int n : {2, 13}) {
        auto cfg = baseline_config();
        cfg.T = 1;
        cfg.N = n;
        cfg.validate();
        const auto table = ActionTable::build(cfg, OrderFilter::Full);
        const StateSpace space(1, n);
        for (double lambda : {0.0, 0.7, 3.0, 50.0}) {
            const double expect = one_slot_oracle(cfg, lambda);
            const ValueTable bi = backward_induction(cfg, table, lambda);
            CHECK(bi[space.index_of(space.initial_state())] ==
                  doctest::Approx(expect).epsilon(1e-12));
            const auto vi = value_iteration(cfg, table, lambda, 1e-10);
            CHECK(vi.values[space.index_of(space.initial_state())] ==
                  doctest::Approx(expect).epsilon(1e-12));
            CHECK(vi.sweeps <= cfg.T);
        }
    }
}

TEST_CASE("value iteration agrees with backward induction and converges fast") {
    const auto cfg = baseline_config();
    const auto table = ActionTable::build(cfg, OrderFilter::Full);
    const StateSpace space(cfg.T, cfg.N);
    for (double lambda : {0.0, 1.0, 16.0, 30.453125, 1000.0}) {
        const ValueTable bi = backward_induction(cfg, table, lambda);
        const auto vi = value_iteration(cfg, table, lambda, 1e-10);
        REQUIRE(bi.size() == vi.values.size());
        for (std::size_t i = 0; i < bi.size(); ++i) {
            CHECK(std::abs(bi[i] - vi.values[i]) < 1e-12);
        }
        CHECK(vi.sweeps <= cfg.T);
        for (int z = 0; z <= cfg.N; ++z) {
            CHECK(vi.values[space.index_of(State{0, z})] == 0.0);
            CHECK(bi[space.index_of(State{0, z})] == 0.0);
        }
    }
}

TEST_CASE("converged values have zero Bellman residual") {
    const auto cfg = baseline_config();
    const auto table = ActionTable::build(cfg, OrderFilter::Full);
    const double xi = 1e-10;
    const auto vi = value_iteration(cfg, table, 16.0, xi);
    const StateSpace space(cfg.T, cfg.N);
    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) continue;
        double best = -1e300;
        for (std::size_t i = 0; i < table.size(); ++i) {
            best = std::max(best, action_value(space, s, table.actions[i], table.outcomes[i],
                                               16.0, cfg, vi.values));
        }
        CHECK(std::abs(vi.values[space.index_of(s)] - best) < xi);
    }
}

TEST_CASE("at lambda zero the packet count is irrelevant") {
    const auto cfg = baseline_config();
    const auto table = ActionTable::build(cfg, OrderFilter::Full);
    const ValueTable values = backward_induction(cfg, table, 0.0);
    const Policy policy = extract_policy(cfg, table, 0.0, values);
    const StateSpace space(cfg.T, cfg.N);
    for (int e = 1; e < cfg.T; ++e) {
        const double v0 = values[space.index_of(State{e, 0})];
        const Action a0 = policy.actions[space.nonterminal_index(State{e, 0})];
        for (int z = 1; z <= cfg.N; ++z) {
            CHECK(values[space.index_of(State{e, z})] == doctest::Approx(v0).epsilon(1e-12));
            CHECK(policy.actions[space.nonterminal_index(State{e, z})] == a0);
        }
    }
}

TEST_CASE("zero rates give an identically zero value function at lambda zero") {
    auto cfg = baseline_config();
    cfg.rate_set_1 = {0};
    cfg.rate_set_2 = {0};
    cfg.validate();
    const auto table = ActionTable::build(cfg, OrderFilter::Full);
    for (double v : backward_induction(cfg, table, 0.0)) CHECK(v == 0.0);
}

TEST_CASE("order filters restrict the extracted policy") {
    const auto cfg = baseline_config();
    const auto table = ActionTable::build(cfg, OrderFilter::Order12Only);
    const ValueTable values = backward_induction(cfg, table, 8.0);
    for (const Action& a : extract_policy(cfg, table, 8.0, values).actions) {
        CHECK(a.order == DecodingOrder::Order12);
    }
}

namespace {

// Tiny instance for exhaustive policy search: T=2, N=1, two power
// splits, rates {0,1} with the idle pair (0,0) removed -> 12 actions,
// 3 nonterminal states, 12^3 policies.
ScenarioConfig tiny_config() {
    auto cfg = baseline_config();
    cfg.T = 2;
    cfg.N = 1;
    cfg.power_set = {{0.9, 0.1}, {0.1, 0.9}};
    cfg.rate_set_1 = {0, 1};
    cfg.rate_set_2 = {0, 1};
    cfg.validate();
    return cfg;
}

std::vector<Action> tiny_actions(const ScenarioConfig& cfg) {
    std::vector<Action> out;
    for (const Action& a : enumerate_actions(cfg, OrderFilter::Full)) {
        if (a.r1 == 0 && a.r2 == 0) continue;
        out.push_back(a);
    }
    return out;
}

template <typename Visit>
void for_each_policy(const ScenarioConfig& cfg, const std::vector<Action>& actions,
                     Visit&& visit) {
    const StateSpace space(cfg.T, cfg.N);
    const std::size_t n_states = space.nonterminal_count();
    const std::size_t n_actions = actions.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n_states; ++i) total *= n_actions;

    Policy policy;
    policy.actions.resize(n_states);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rem = code;
        for (std::size_t i = 0; i < n_states; ++i) {
            policy.actions[i] = actions[rem % n_actions];
            rem /= n_actions;
        }
        visit(policy);
    }
}

}  // namespace

TEST_CASE("exhaustive policy search reproduces the optimal Lagrangian") {
    const auto cfg = tiny_config();
    const auto actions = tiny_actions(cfg);
    REQUIRE(actions.size() == 12);
    const auto table = ActionTable::build(cfg, actions);
    const StateSpace space(cfg.T, cfg.N);
    REQUIRE(space.nonterminal_count() == 3);

    for (double lambda : {0.0, 1.0, 10.0}) {
        double best = -1e300;
        for_each_policy(cfg, actions, [&](const Policy& policy) {
            best = std::max(best,
                            policy_value_oracle(cfg, policy, lambda)[space.index_of(
                                space.initial_state())]);
        });

        const ValueTable values = backward_induction(cfg, table, lambda);
        const double v_star = values[space.index_of(space.initial_state())];
        CHECK(v_star == doctest::Approx(best).epsilon(1e-9));

        // The greedy policy attains the same Lagrangian.
        const Policy greedy = extract_policy(cfg, table, lambda, values);
        CHECK(policy_value_oracle(cfg, greedy, lambda)[space.index_of(space.initial_state())] ==
              doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("a huge multiplier drives the policy to the minimum outage") {
    const auto cfg = tiny_config();
    const auto actions = tiny_actions(cfg);
    const auto table = ActionTable::build(cfg, actions);

    double min_outage = 1.0;
    for_each_policy(cfg, actions, [&](const Policy& policy) {
        min_outage = std::min(min_outage, outage_oracle(cfg, policy));
    });

    // The outage levels of this instance sit ~1e-8 apart, so the
    // multiplier must outweigh the full capacity range (2 packets)
    // across such a gap.
    const double lambda = 1e12;
    const ValueTable values = backward_induction(cfg, table, lambda);
    const Policy policy = extract_policy(cfg, table, lambda, values);
    CHECK(std::abs(evaluate_policy_exact(cfg, policy).outage_prob - min_outage) <= 1e-10);
}

TEST_CASE("exact evaluation of degenerate policies") {
    const auto cfg = baseline_config();
    const StateSpace space(cfg.T, cfg.N);

    SUBCASE("idle policy delivers nothing and always misses the deadline") {
        Policy idle;
        idle.actions.assign(space.nonterminal_count(),
                            Action{DecodingOrder::Order12, power_index(cfg, 0.5, 0.5), 0, 0});
        const EvaluationResult eval = evaluate_policy_exact(cfg, idle);
        CHECK(eval.expected_capacity == 0.0);
        CHECK(eval.outage_prob == 1.0);
        CHECK(lagrangian(eval, 5.0, 0.1) == doctest::Approx(-4.5));
    }

    SUBCASE("a certain-delivery channel reaches exactly zero outage") {
        auto sure = cfg;
        sure.sigma1_sq_dbm = -250.0;  // failure exponent below double resolution
        sure.sigma2_sq_dbm = -250.0;
        sure.validate();
        Policy policy;
        policy.actions.assign(space.nonterminal_count(),
                              Action{DecodingOrder::Order12, power_index(sure, 1.0, 0.0), 4, 0});
        REQUIRE(user_success_probs(sure, policy.actions[0]).first == 1.0);
        // 4 packets per slot for 4 slots covers N = 13.
        const EvaluationResult eval = evaluate_policy_exact(sure, policy);
        CHECK(eval.outage_prob == 0.0);
        CHECK(eval.expected_capacity == 0.0);
    }

    SUBCASE("policy must cover every nonterminal state") {
        Policy incomplete;
        incomplete.actions.assign(space.nonterminal_count() - 1,
                                  Action{DecodingOrder::Order12, 0, 0, 0});
        CHECK_THROWS_AS(evaluate_policy_exact(cfg, incomplete), std::invalid_argument);
    }
}

TEST_CASE("forward evaluation equals the return recursion for any policy") {
    const auto cfg = baseline_config();
    const auto actions = enumerate_actions(cfg, OrderFilter::Full);
    const StateSpace space(cfg.T, cfg.N);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Policy policy = random_policy(cfg, actions, seed);
        const EvaluationResult eval = evaluate_policy_exact(cfg, policy);
        for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
            const double via_recursion =
                policy_value_oracle(cfg, policy, lambda)[space.index_of(space.initial_state())];
            CHECK(eval.lagrangian_at(lambda) ==
                  doctest::Approx(via_recursion).epsilon(1e-9));
        }
    }
}

TEST_CASE("optimal value dominates every fixed-order value statewise") {
    const auto cfg = baseline_config();
    const auto full = ActionTable::build(cfg, OrderFilter::Full);
    const auto only12 = ActionTable::build(cfg, OrderFilter::Order12Only);
    const auto only21 = ActionTable::build(cfg, OrderFilter::Order21Only);
    for (double lambda : {0.0, 8.0, 32.0}) {
        const ValueTable v_full = backward_induction(cfg, full, lambda);
        const ValueTable v_12 = backward_induction(cfg, only12, lambda);
        const ValueTable v_21 = backward_induction(cfg, only21, lambda);
        for (std::size_t i = 0; i < v_full.size(); ++i) {
            CHECK(v_full[i] >= v_12[i] - 1e-12);
            CHECK(v_full[i] >= v_21[i] - 1e-12);
        }
    }
}

TEST_CASE("dual function values are convex on a lambda grid") {
    const auto cfg = baseline_config();
    const StateSpace space(cfg.T, cfg.N);
    for (OrderFilter f :
         {OrderFilter::Full, OrderFilter::Order12Only, OrderFilter::Order21Only}) {
        const auto table = ActionTable::build(cfg, f);
        std::vector<double> lambdas;
        for (int i = 0; i <= 16; ++i) lambdas.push_back(4.0 * i);
        std::vector<double> values;
        for (double lambda : lambdas) {
            values.push_back(backward_induction(cfg, table, lambda)[space.index_of(
                space.initial_state())]);
        }
        for (std::size_t i = 2; i < values.size(); ++i) {
            CHECK(values[i] - 2.0 * values[i - 1] + values[i - 2] >= -1e-9);
        }
    }
}

TEST_CASE("policy CSV round-trips, is byte-stable, and validates input") {
    const auto cfg = baseline_config();
    const auto table = ActionTable::build(cfg, OrderFilter::Full);
    const ValueTable values = backward_induction(cfg, table, 16.0);
    const Policy policy = extract_policy(cfg, table, 16.0, values);

    TempDir tmp("policycsv");
    const auto path = tmp.file("policy.csv");
    write_policy_csv(path, cfg, policy, values);

    const Policy loaded = read_policy_csv(path, cfg);
    REQUIRE(loaded.actions.size() == policy.actions.size());
    for (std::size_t i = 0; i < policy.actions.size(); ++i) {
        CHECK(loaded.actions[i] == policy.actions[i]);
    }

    const auto path2 = tmp.file("policy2.csv");
    write_policy_csv(path2, cfg, policy, values);
    std::ifstream a(path), b(path2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());

    SUBCASE("missing state is reported by name") {
        std::vector<std::string> lines;
        {
            std::ifstream in(path);
            std::string line;
            while (std::getline(in, line)) lines.push_back(line);
        }
        // Drop the row for state (1, 5): header at line 0, rows for
        // (1, 0)..(1, 13) at lines 1..14.
        lines.erase(lines.begin() + 6);
        std::ofstream out(tmp.file("short.csv"));
        for (const auto& l : lines) out << l << "\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_policy_csv(tmp.file("short.csv"), cfg),
                             doctest::Contains("(E=1, Z=5)"), ConfigError);
    }
    SUBCASE("foreign power pair is rejected") {
        const auto bad = tmp.write_file(
            "bad.csv", "E,Z,order,v1,v2,r1,r2,value\n1,0,order12,0.25,0.75,1,1,0\n");
        CHECK_THROWS_WITH_AS(read_policy_csv(bad, cfg), doctest::Contains("power_set"),
                             ConfigError);
    }
    SUBCASE("unknown order token is rejected") {
        const auto bad = tmp.write_file(
            "bad2.csv", "E,Z,order,v1,v2,r1,r2,value\n1,0,sideways,0.9,0.1,1,1,0\n");
        CHECK_THROWS_WITH_AS(read_policy_csv(bad, cfg), doctest::Contains("decoding order"),
                             ConfigError);
    }
    SUBCASE("duplicate state is rejected") {
        std::ifstream in(path);
        std::stringstream all;
        all << in.rdbuf();
        const auto bad = tmp.write_file("dup.csv", all.str() + "1,0,order12,0.9,0.1,1,1,0\n");
        CHECK_THROWS_WITH_AS(read_policy_csv(bad, cfg), doctest::Contains("duplicate"),
                             ConfigError);
    }
}
