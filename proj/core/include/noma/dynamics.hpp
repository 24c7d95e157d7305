#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "noma/scenario.hpp"

namespace noma {

/// SIC decoding order at the receivers. Order12 decodes user 1's stream
/// first (user 1 treats user 2 as interference, user 2 cancels user 1
/// when it can); Order21 is the mirror.
enum class DecodingOrder : std::uint8_t { Order12 = 0, Order21 = 1 };

/// One per-slot transmit decision: decoding order, power split (index
/// into ScenarioConfig::power_set), and target rates in packets/slot.
struct Action {
    DecodingOrder order = DecodingOrder::Order12;
    int power_idx = 0;
    int r1 = 0;
    int r2 = 0;

    friend bool operator==(const Action&, const Action&) = default;
};

/// Joint distribution of the per-slot delivery outcome (d1, d2), where
/// user k either receives its full target (d_k = r_k) or nothing.
/// Entries sum to 1. When r_k = 0 the two d_k outcomes coincide; mass is
/// carried on the d_k = r_k entries (the success probability is exactly
/// 1, so the complementary entries are exactly 0).
struct OutcomeDistribution {
    double p_11 = 0.0;  ///< d1 = r1, d2 = r2
    double p_10 = 0.0;  ///< d1 = r1, d2 = 0
    double p_01 = 0.0;  ///< d1 = 0,  d2 = r2
    double p_00 = 0.0;  ///< d1 = 0,  d2 = 0
};

/// Restriction of the action set to one decoding order (fixed-order
/// baselines) or none (the full set).
enum class OrderFilter : std::uint8_t { Full = 0, Order12Only = 1, Order21Only = 2 };

// Closed-form per-slot success probabilities over the unit-mean
// exponential fading of each user's channel. A rate of 0 is a success
// with probability exactly 1 (nothing to deliver); power splits that
// cannot reach the SINR threshold for any fading realization give
// exactly 0. Derivations: docs/success-probabilities.md.

/// P{d1 = r1} under Order12: user 1 decodes its own stream against
/// user 2's interference.
double p_u1_success_order12(const ScenarioConfig& cfg, double v1, double v2, int r1);

/// P{d2 = r2} under Order12: user 2 first tries to decode and cancel
/// user 1's stream, then decodes its own (five-branch closed form).
double p_u2_success_order12(const ScenarioConfig& cfg, double v1, double v2, int r1, int r2);

/// P{d2 = r2} under Order21: user 2 decodes its own stream against
/// user 1's interference.
double p_u2_success_order21(const ScenarioConfig& cfg, double v1, double v2, int r2);

/// P{d1 = r1} under Order21: user 1 first tries to decode and cancel
/// user 2's stream, then decodes its own (mirror of the Order12 form).
double p_u1_success_order21(const ScenarioConfig& cfg, double v1, double v2, int r1, int r2);

/// (P{d1 = r1}, P{d2 = r2}) for the action's decoding order.
std::pair<double, double> user_success_probs(const ScenarioConfig& cfg, const Action& a);

/// Joint outcome distribution of an action. The two users' fading gains
/// are independent, and under either order d1 depends only on g1 and d2
/// only on g2, so the joint law is the product of the marginals.
OutcomeDistribution outcome_distribution(const ScenarioConfig& cfg, const Action& a);

/// Enumerates the action grid order x power_set x rate_set_1 x rate_set_2
/// in the canonical ordering (order, power_idx, r1, r2); ties everywhere
/// else in the library are broken by position in this list.
std::vector<Action> enumerate_actions(const ScenarioConfig& cfg, OrderFilter filter);

namespace detail {

/// Exponents of the SIC success closed form, exposed for validation:
/// sic is the threshold for cancelling the first-decoded stream,
/// interf/clean are the own-stream thresholds with and without that
/// interference. clean_total = max(sic, clean) by construction.
struct SicExponents {
    double sic = 0.0;
    double interf = 0.0;
    double clean_total = 0.0;
};

SicExponents sic_exponents(double total_power, double beta, double sigma_sq,
                           double v_first, double v_own, double thr_first, double thr_own);

}  // namespace detail

}  // namespace noma
