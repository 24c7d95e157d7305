#include "noma/sim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "text_util.hpp"

namespace noma {

using detail::format_double;

double uniform_unit(std::mt19937_64& rng) {
    // 53 random bits scaled to [0, 1); avoids the unspecified behaviour
    // of std::uniform_real_distribution across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential_unit_mean(std::mt19937_64& rng) {
    return -std::log1p(-uniform_unit(rng));
}

double capacity_pkts(const ScenarioConfig& cfg, double beta, double sigma_sq,
                     double g, double v_sig, double v_int, int packet_bits) {
    const double received = cfg.P_w * beta * g;
    const double sinr = received * v_sig / (sigma_sq + received * v_int);
    return cfg.symbols_per_slot() / static_cast<double>(packet_bits) * std::log2(1.0 + sinr);
}

SlotDelivery realize_slot(const ScenarioConfig& cfg, const Action& a, double g1, double g2) {
    const PowerPair p = cfg.power_set.at(static_cast<std::size_t>(a.power_idx));
    SlotDelivery out;
    if (a.order == DecodingOrder::Order12) {
        // User 1 decodes its own stream against user 2's interference.
        const double own1 =
            capacity_pkts(cfg, cfg.beta1, cfg.sigma1_sq_w, g1, p.v1, p.v2, cfg.Y1);
        out.d1 = own1 >= static_cast<double>(a.r1) ? a.r1 : 0;

        // User 2 first decodes user 1's stream; on success it cancels it.
        const double sic2 =
            capacity_pkts(cfg, cfg.beta2, cfg.sigma2_sq_w, g2, p.v1, p.v2, cfg.Y1);
        const double own2 =
            sic2 >= static_cast<double>(a.r1)
                ? capacity_pkts(cfg, cfg.beta2, cfg.sigma2_sq_w, g2, p.v2, 0.0, cfg.Y2)
                : capacity_pkts(cfg, cfg.beta2, cfg.sigma2_sq_w, g2, p.v2, p.v1, cfg.Y2);
        out.d2 = own2 >= static_cast<double>(a.r2) ? a.r2 : 0;
    } else {
        const double own2 =
            capacity_pkts(cfg, cfg.beta2, cfg.sigma2_sq_w, g2, p.v2, p.v1, cfg.Y2);
        out.d2 = own2 >= static_cast<double>(a.r2) ? a.r2 : 0;

        const double sic1 =
            capacity_pkts(cfg, cfg.beta1, cfg.sigma1_sq_w, g1, p.v2, p.v1, cfg.Y2);
        const double own1 =
            sic1 >= static_cast<double>(a.r2)
                ? capacity_pkts(cfg, cfg.beta1, cfg.sigma1_sq_w, g1, p.v1, 0.0, cfg.Y1)
                : capacity_pkts(cfg, cfg.beta1, cfg.sigma1_sq_w, g1, p.v1, p.v2, cfg.Y1);
        out.d1 = own1 >= static_cast<double>(a.r1) ? a.r1 : 0;
    }
    return out;
}

EpisodeRecord sample_episode(const ScenarioConfig& cfg, const Policy& policy,
                             double lambda, std::uint64_t seed) {
    const StateSpace space(cfg.T, cfg.N);
    if (policy.actions.size() != space.nonterminal_count()) {
        throw std::invalid_argument("policy does not cover every nonterminal state");
    }

    std::mt19937_64 rng(seed);
    EpisodeRecord episode;
    episode.slots.reserve(static_cast<std::size_t>(cfg.T));

    State s = space.initial_state();
    for (int t = 0; t < cfg.T; ++t) {
        const Action a = policy.actions[space.nonterminal_index(s)];
        const double g1 = exponential_unit_mean(rng);
        const double g2 = exponential_unit_mean(rng);
        const SlotDelivery d = realize_slot(cfg, a, g1, g2);
        const State next = transition(s, d.d1);
        const RewardParts parts = reward_components(next, d.d2, cfg);
        episode.total_return += parts.capacity + lambda * parts.constraint;
        episode.slots.push_back(SlotRecord{s, a, g1, g2, d.d1, d.d2});
        s = next;
    }
    episode.terminal_remaining = s.remaining_packets;
    episode.delivery_success = s.remaining_packets == 0;
    return episode;
}

MonteCarloEstimate monte_carlo(const ScenarioConfig& cfg, const Policy& policy,
                               double lambda, std::uint64_t episodes, std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("monte_carlo requires episodes >= 1");

    double sum_return = 0.0;
    double sumsq_return = 0.0;
    double sum_capacity = 0.0;
    double sumsq_capacity = 0.0;
    std::uint64_t failures = 0;

    for (std::uint64_t m = 0; m < episodes; ++m) {
        const EpisodeRecord ep = sample_episode(cfg, policy, lambda, seed + m);
        double capacity = 0.0;
        for (const SlotRecord& slot : ep.slots) capacity += slot.d2;
        sum_return += ep.total_return;
        sumsq_return += ep.total_return * ep.total_return;
        sum_capacity += capacity;
        sumsq_capacity += capacity * capacity;
        if (!ep.delivery_success) ++failures;
    }

    const double n = static_cast<double>(episodes);
    MonteCarloEstimate est;
    est.episodes = episodes;
    est.mean_return = sum_return / n;
    est.mean_capacity = sum_capacity / n;
    est.outage = static_cast<double>(failures) / n;
    if (episodes > 1) {
        const double var_return =
            std::max(0.0, (sumsq_return - n * est.mean_return * est.mean_return) / (n - 1.0));
        const double var_capacity = std::max(
            0.0, (sumsq_capacity - n * est.mean_capacity * est.mean_capacity) / (n - 1.0));
        est.se_return = std::sqrt(var_return / n);
        est.se_capacity = std::sqrt(var_capacity / n);
        est.se_outage = std::sqrt(est.outage * (1.0 - est.outage) / n);
    }
    return est;
}

void write_episode_csv(const std::string& path, const ScenarioConfig& cfg,
                       const EpisodeRecord& episode) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path + ": cannot open for writing");
    out << "slot,E,Z,order,v1,v2,r1,r2,g1,g2,d1,d2\n";
    for (std::size_t t = 0; t < episode.slots.size(); ++t) {
        const SlotRecord& slot = episode.slots[t];
        const PowerPair p = cfg.power_set.at(static_cast<std::size_t>(slot.action.power_idx));
        out << t + 1 << ',' << slot.state.remaining_slots << ','
            << slot.state.remaining_packets << ','
            << (slot.action.order == DecodingOrder::Order12 ? "order12" : "order21") << ','
            << format_double(p.v1) << ',' << format_double(p.v2) << ',' << slot.action.r1
            << ',' << slot.action.r2 << ',' << format_double(slot.g1) << ','
            << format_double(slot.g2) << ',' << slot.d1 << ',' << slot.d2 << "\n";
    }
}

}  // namespace noma
