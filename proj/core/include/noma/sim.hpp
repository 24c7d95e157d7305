#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "noma/mdp.hpp"

namespace noma {

// Monte-Carlo episode simulator. Deliveries are decided by evaluating
// the log-domain capacity expressions at sampled fading gains, not by
// comparing against the closed-form SINR thresholds, so this path is an
// independent check of the dynamics module.

/// Uniform draw in [0, 1) with 53 random bits. The generator sequence
/// is fully specified by the standard, so results are identical across
/// platforms for a given seed.
double uniform_unit(std::mt19937_64& rng);

/// Unit-mean exponential via inverse CDF: -ln(1 - U).
double exponential_unit_mean(std::mt19937_64& rng);

/// Channel capacity in packets/slot for a stream received with fading
/// power gain beta*g, signal fraction v_sig and in-band interference
/// fraction v_int of the total power:
/// (tau*W/Y) * log2(1 + P*beta*g*v_sig / (sigma_sq + P*beta*g*v_int)).
double capacity_pkts(const ScenarioConfig& cfg, double beta, double sigma_sq,
                     double g, double v_sig, double v_int, int packet_bits);

/// Deliveries (d1, d2) for one slot given the fading gains, by the
/// exact case analysis of the SIC chain for the action's order. A rate
/// of 0 is always satisfied and delivers 0 packets.
struct SlotDelivery {
    int d1 = 0;
    int d2 = 0;
};
SlotDelivery realize_slot(const ScenarioConfig& cfg, const Action& a, double g1, double g2);

struct SlotRecord {
    State state;      ///< state at the start of the slot
    Action action;
    double g1 = 0.0;
    double g2 = 0.0;
    int d1 = 0;
    int d2 = 0;
};

struct EpisodeRecord {
    std::vector<SlotRecord> slots;    ///< exactly T entries
    int terminal_remaining = 0;       ///< packets still owed at the end
    double total_return = 0.0;        ///< sum of d2 + lambda * c over slots
    bool delivery_success = false;    ///< terminal_remaining == 0
};

/// Simulates one episode under the policy, drawing g1, g2 fresh each
/// slot. Identical output for identical (cfg, policy, lambda, seed).
EpisodeRecord sample_episode(const ScenarioConfig& cfg, const Policy& policy,
                             double lambda, std::uint64_t seed);

struct MonteCarloEstimate {
    std::uint64_t episodes = 0;
    double mean_return = 0.0;
    double se_return = 0.0;
    double mean_capacity = 0.0;  ///< mean of sum of d2
    double se_capacity = 0.0;
    double outage = 0.0;         ///< fraction of episodes ending with packets owed
    double se_outage = 0.0;      ///< binomial standard error
};

/// Runs `episodes` independent episodes; episode m uses seed + m, so a
/// batch can be split across workers without changing the result.
/// Pre: episodes >= 1. Standard errors are 0 when episodes == 1.
MonteCarloEstimate monte_carlo(const ScenarioConfig& cfg, const Policy& policy,
                               double lambda, std::uint64_t episodes, std::uint64_t seed);

/// Debug dump of one episode.
/// Columns: slot,E,Z,order,v1,v2,r1,r2,g1,g2,d1,d2.
void write_episode_csv(const std::string& path, const ScenarioConfig& cfg,
                       const EpisodeRecord& episode);

}  // namespace noma
