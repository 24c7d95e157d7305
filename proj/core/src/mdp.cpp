#include "noma/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "text_util.hpp"

namespace noma {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split_char;
using detail::trim;

StateSpace::StateSpace(int T, int N) : T_(T), N_(N) {
    if (T < 1 || N < 1) throw std::invalid_argument("StateSpace requires T >= 1 and N >= 1");
    states_.reserve(static_cast<std::size_t>(T) * (N + 1) + 1);
    for (int e = 0; e < T; ++e) {
        for (int z = 0; z <= N; ++z) states_.push_back(State{e, z});
    }
    states_.push_back(State{T, N});
}

std::size_t StateSpace::index_of(State s) const {
    if (s.remaining_slots == T_) {
        if (s.remaining_packets != N_) {
            throw std::out_of_range("only (T, N) exists at the full horizon");
        }
        return static_cast<std::size_t>(T_) * (N_ + 1);
    }
    if (s.remaining_slots < 0 || s.remaining_slots > T_ || s.remaining_packets < 0 ||
        s.remaining_packets > N_) {
        throw std::out_of_range("state outside the (T, N) grid");
    }
    return static_cast<std::size_t>(s.remaining_slots) * (N_ + 1) + s.remaining_packets;
}

std::size_t StateSpace::nonterminal_index(State s) const {
    if (is_terminal(s)) throw std::out_of_range("terminal state has no policy entry");
    return index_of(s) - static_cast<std::size_t>(N_ + 1);
}

std::vector<State> build_state_space(int T, int N) { return StateSpace(T, N).states(); }

State transition(State s, int d1) {
    if (StateSpace::is_terminal(s)) {
        throw std::logic_error("transition called on a terminal state");
    }
    return State{s.remaining_slots - 1, std::max(0, s.remaining_packets - d1)};
}

RewardParts reward_components(State next, int d2, const ScenarioConfig& cfg) {
    RewardParts parts;
    parts.capacity = static_cast<double>(d2);
    if (next.remaining_slots > 0) {
        parts.constraint = 0.0;
    } else if (next.remaining_packets > 0) {
        parts.constraint = cfg.delta - 1.0;
    } else {
        parts.constraint = cfg.delta;
    }
    return parts;
}

ActionTable ActionTable::build(const ScenarioConfig& cfg, OrderFilter filter) {
    return build(cfg, enumerate_actions(cfg, filter));
}

ActionTable ActionTable::build(const ScenarioConfig& cfg, std::vector<Action> actions) {
    ActionTable table;
    table.actions = std::move(actions);
    table.outcomes.reserve(table.actions.size());
    for (const Action& a : table.actions) {
        table.outcomes.push_back(outcome_distribution(cfg, a));
    }
    return table;
}

double action_value(const StateSpace& space, State s, const Action& a,
                    const OutcomeDistribution& dist, double lambda,
                    const ScenarioConfig& cfg, const ValueTable& values) {
    const State delivered = transition(s, a.r1);
    const State missed = transition(s, 0);

    double q = 0.0;
    auto add = [&](double p, State next, int d2) {
        if (p == 0.0) return;
        const RewardParts parts = reward_components(next, d2, cfg);
        q += p * (parts.capacity + lambda * parts.constraint + values[space.index_of(next)]);
    };
    add(dist.p_11, delivered, a.r2);
    add(dist.p_10, delivered, 0);
    add(dist.p_01, missed, a.r2);
    add(dist.p_00, missed, 0);
    return q;
}

namespace {

double best_action_value(const StateSpace& space, State s, const ActionTable& table,
                         double lambda, const ScenarioConfig& cfg, const ValueTable& values) {
    if (table.actions.empty()) throw std::invalid_argument("empty action table");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.actions.size(); ++i) {
        best = std::max(best,
                        action_value(space, s, table.actions[i], table.outcomes[i],
                                     lambda, cfg, values));
    }
    return best;
}

}  // namespace

ValueIterationResult value_iteration(const ScenarioConfig& cfg, const ActionTable& table,
                                     double lambda, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("value_iteration requires xi > 0");
    const StateSpace space(cfg.T, cfg.N);

    ValueIterationResult result;
    result.values.assign(space.size(), 0.0);
    for (;;) {
        double max_change = 0.0;
        for (const State& s : space.states()) {
            if (StateSpace::is_terminal(s)) continue;
            const std::size_t idx = space.index_of(s);
            const double before = result.values[idx];
            result.values[idx] = best_action_value(space, s, table, lambda, cfg, result.values);
            max_change = std::max(max_change, std::abs(result.values[idx] - before));
        }
        if (max_change < xi) break;
        ++result.sweeps;
    }
    return result;
}

ValueTable backward_induction(const ScenarioConfig& cfg, const ActionTable& table,
                              double lambda) {
    const StateSpace space(cfg.T, cfg.N);
    ValueTable values(space.size(), 0.0);
    // Canonical order is increasing remaining_slots, so every successor
    // value is final before it is read.
    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) continue;
        values[space.index_of(s)] = best_action_value(space, s, table, lambda, cfg, values);
    }
    return values;
}

Policy extract_policy(const ScenarioConfig& cfg, const ActionTable& table,
                      double lambda, const ValueTable& values) {
    const StateSpace space(cfg.T, cfg.N);
    if (values.size() != space.size()) {
        throw std::invalid_argument("value table size does not match the state space");
    }
    Policy policy;
    policy.actions.resize(space.nonterminal_count());
    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) continue;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < table.actions.size(); ++i) {
            const double q = action_value(space, s, table.actions[i], table.outcomes[i],
                                          lambda, cfg, values);
            if (q > best) {
                best = q;
                best_idx = i;
            }
        }
        policy.actions[space.nonterminal_index(s)] = table.actions[best_idx];
    }
    return policy;
}

EvaluationResult evaluate_policy_exact(const ScenarioConfig& cfg, const Policy& policy) {
    const StateSpace space(cfg.T, cfg.N);
    if (policy.actions.size() != space.nonterminal_count()) {
        throw std::invalid_argument("policy does not cover every nonterminal state");
    }

    std::vector<double> mass(space.size(), 0.0);
    mass[space.index_of(space.initial_state())] = 1.0;

    double capacity = 0.0;
    for (int slot = 0; slot < cfg.T; ++slot) {
        std::vector<double> next_mass(space.size(), 0.0);
        for (const State& s : space.states()) {
            const double m = mass[space.index_of(s)];
            if (m == 0.0) continue;
            if (StateSpace::is_terminal(s)) {
                next_mass[space.index_of(s)] += m;
                continue;
            }
            const Action a = policy.actions[space.nonterminal_index(s)];
            const OutcomeDistribution d = outcome_distribution(cfg, a);
            capacity += m * (d.p_11 + d.p_01) * a.r2;
            next_mass[space.index_of(transition(s, a.r1))] += m * (d.p_11 + d.p_10);
            next_mass[space.index_of(transition(s, 0))] += m * (d.p_01 + d.p_00);
        }
        mass.swap(next_mass);
    }

    double outage = 0.0;
    for (int z = 1; z <= cfg.N; ++z) {
        outage += mass[space.index_of(State{0, z})];
    }

    EvaluationResult result;
    result.expected_capacity = capacity;
    result.outage_prob = outage;
    result.delta = cfg.delta;
    return result;
}

namespace {

const char* order_token(DecodingOrder order) {
    return order == DecodingOrder::Order12 ? "order12" : "order21";
}

constexpr char kPolicyHeader[] = "E,Z,order,v1,v2,r1,r2,value";

}  // namespace

void write_policy_csv(const std::string& path, const ScenarioConfig& cfg,
                      const Policy& policy, const ValueTable& values) {
    const StateSpace space(cfg.T, cfg.N);
    if (policy.actions.size() != space.nonterminal_count() || values.size() != space.size()) {
        throw std::invalid_argument("policy/value tables do not match the state space");
    }
    std::ofstream out(path);
    if (!out) throw ConfigError(path + ": cannot open for writing");
    out << kPolicyHeader << "\n";
    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) continue;
        const Action a = policy.actions[space.nonterminal_index(s)];
        const PowerPair p = cfg.power_set.at(static_cast<std::size_t>(a.power_idx));
        out << s.remaining_slots << ',' << s.remaining_packets << ','
            << order_token(a.order) << ',' << format_double(p.v1) << ','
            << format_double(p.v2) << ',' << a.r1 << ',' << a.r2 << ','
            << format_double(values[space.index_of(s)]) << "\n";
    }
}

Policy read_policy_csv(const std::string& path, const ScenarioConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open policy file");

    const StateSpace space(cfg.T, cfg.N);
    Policy policy;
    policy.actions.resize(space.nonterminal_count());
    std::vector<bool> filled(space.nonterminal_count(), false);

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (lineno == 1) {
            if (sv != kPolicyHeader) {
                throw ConfigError(where + ": expected header '" + kPolicyHeader + "'");
            }
            continue;
        }
        const auto cols = split_char(sv, ',');
        if (cols.size() != 8) throw ConfigError(where + ": expected 8 columns");

        State s;
        Action a;
        double v1 = 0.0;
        double v2 = 0.0;
        if (!parse_int(cols[0], s.remaining_slots) || !parse_int(cols[1], s.remaining_packets)) {
            throw ConfigError(where + ": malformed state columns");
        }
        const std::string_view order = trim(cols[2]);
        if (order == "order12") a.order = DecodingOrder::Order12;
        else if (order == "order21") a.order = DecodingOrder::Order21;
        else throw ConfigError(where + ": unknown decoding order '" + std::string(order) + "'");
        if (!parse_double(cols[3], v1) || !parse_double(cols[4], v2) ||
            !parse_int(cols[5], a.r1) || !parse_int(cols[6], a.r2)) {
            throw ConfigError(where + ": malformed action columns");
        }

        constexpr double kPowerTol = 1e-9;
        int power_idx = -1;
        for (std::size_t i = 0; i < cfg.power_set.size(); ++i) {
            if (std::abs(cfg.power_set[i].v1 - v1) <= kPowerTol &&
                std::abs(cfg.power_set[i].v2 - v2) <= kPowerTol) {
                power_idx = static_cast<int>(i);
                break;
            }
        }
        if (power_idx < 0) {
            throw ConfigError(where + ": power pair (" + format_double(v1) + "," +
                              format_double(v2) + ") is not in the scenario's power_set");
        }
        a.power_idx = power_idx;
        if (std::find(cfg.rate_set_1.begin(), cfg.rate_set_1.end(), a.r1) ==
            cfg.rate_set_1.end()) {
            throw ConfigError(where + ": r1 = " + std::to_string(a.r1) +
                              " is not in rate_set_1");
        }
        if (std::find(cfg.rate_set_2.begin(), cfg.rate_set_2.end(), a.r2) ==
            cfg.rate_set_2.end()) {
            throw ConfigError(where + ": r2 = " + std::to_string(a.r2) +
                              " is not in rate_set_2");
        }

        std::size_t idx = 0;
        try {
            idx = space.nonterminal_index(s);
        } catch (const std::out_of_range&) {
            throw ConfigError(where + ": state (E=" + std::to_string(s.remaining_slots) +
                              ", Z=" + std::to_string(s.remaining_packets) +
                              ") is not a nonterminal state of this scenario");
        }
        if (filled[idx]) {
            throw ConfigError(where + ": duplicate row for state (E=" +
                              std::to_string(s.remaining_slots) + ", Z=" +
                              std::to_string(s.remaining_packets) + ")");
        }
        filled[idx] = true;
        policy.actions[idx] = a;
    }

    for (const State& s : space.states()) {
        if (StateSpace::is_terminal(s)) continue;
        if (!filled[space.nonterminal_index(s)]) {
            throw ConfigError(path + ": missing policy row for state (E=" +
                              std::to_string(s.remaining_slots) + ", Z=" +
                              std::to_string(s.remaining_packets) + ")");
        }
    }
    return policy;
}

}  // namespace noma
