#include "noma/dynamics.hpp"

#include <cmath>
#include <limits>

namespace noma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// P{ P*beta*g*v_sig / (sigma_sq + P*beta*g*v_int) >= thr } for g ~ Exp(1).
// Solving for g: the event is g >= sigma_sq*thr / (P*beta*(v_sig - v_int*thr))
// when the margin v_sig - v_int*thr is positive, and empty otherwise
// (the SINR then stays below thr for every fading realization).
double direct_decode_success(double total_power, double beta, double sigma_sq,
                             double v_sig, double v_int, double thr) {
    if (thr <= 0.0) return 1.0;
    const double margin = v_sig - v_int * thr;
    if (margin <= 0.0) return 0.0;
    return std::exp(-sigma_sq * thr / (total_power * beta * margin));
}

// Success probability of the user decoded second in the SIC chain, at its
// own receiver with channel (beta, sigma_sq). The receiver first attempts
// to decode the stream decoded first (power fraction v_first, SINR
// threshold thr_first); on success it cancels that stream and decodes its
// own stream (v_own, thr_own) interference-free, otherwise it decodes its
// own stream against v_first as interference. Integrating the disjoint
// g-regions against the Exp(1) density gives five branches; see
// docs/success-probabilities.md.
double sic_decode_success(double total_power, double beta, double sigma_sq,
                          double v_first, double v_own, double thr_first, double thr_own) {
    if (thr_own <= 0.0) return 1.0;

    const auto e = detail::sic_exponents(total_power, beta, sigma_sq,
                                         v_first, v_own, thr_first, thr_own);
    // Cancellation is possible for some g iff the first stream's SINR can
    // reach thr_first: always when thr_first = 0, else when the margin is
    // strictly positive.
    const bool cancel_feasible = thr_first <= 0.0 || v_first - v_own * thr_first > 0.0;
    const bool interf_feasible = v_own - v_first * thr_own > 0.0;

    if (cancel_feasible && interf_feasible) {
        if (e.interf > e.sic) return std::exp(-e.clean_total);
        return std::exp(-e.interf) + std::exp(-e.clean_total) - std::exp(-e.sic);
    }
    if (cancel_feasible) return std::exp(-e.clean_total);
    if (interf_feasible) return std::exp(-e.interf);
    return 0.0;
}

}  // namespace

namespace detail {

SicExponents sic_exponents(double total_power, double beta, double sigma_sq,
                           double v_first, double v_own, double thr_first, double thr_own) {
    SicExponents e;
    const double pb = total_power * beta;

    const double margin_first = v_first - v_own * thr_first;
    e.sic = thr_first <= 0.0 ? 0.0
            : margin_first > 0.0 ? sigma_sq * thr_first / (pb * margin_first)
                                 : kInf;

    const double margin_interf = v_own - v_first * thr_own;
    e.interf = thr_own <= 0.0 ? 0.0
               : margin_interf > 0.0 ? sigma_sq * thr_own / (pb * margin_interf)
                                     : kInf;

    const double clean = thr_own <= 0.0 ? 0.0
                         : v_own > 0.0 ? sigma_sq * thr_own / (pb * v_own)
                                       : kInf;
    e.clean_total = std::max(e.sic, clean);
    return e;
}

}  // namespace detail

double p_u1_success_order12(const ScenarioConfig& cfg, double v1, double v2, int r1) {
    if (r1 <= 0) return 1.0;
    const double thr = spectral_threshold(cfg.Y1, r1, cfg.tau_s, cfg.W_hz);
    return direct_decode_success(cfg.P_w, cfg.beta1, cfg.sigma1_sq_w, v1, v2, thr);
}

double p_u2_success_order12(const ScenarioConfig& cfg, double v1, double v2, int r1, int r2) {
    if (r2 <= 0) return 1.0;
    const double thr1 = spectral_threshold(cfg.Y1, r1, cfg.tau_s, cfg.W_hz);
    const double thr2 = spectral_threshold(cfg.Y2, r2, cfg.tau_s, cfg.W_hz);
    return sic_decode_success(cfg.P_w, cfg.beta2, cfg.sigma2_sq_w, v1, v2, thr1, thr2);
}

double p_u2_success_order21(const ScenarioConfig& cfg, double v1, double v2, int r2) {
    if (r2 <= 0) return 1.0;
    const double thr = spectral_threshold(cfg.Y2, r2, cfg.tau_s, cfg.W_hz);
    return direct_decode_success(cfg.P_w, cfg.beta2, cfg.sigma2_sq_w, v2, v1, thr);
}

double p_u1_success_order21(const ScenarioConfig& cfg, double v1, double v2, int r1, int r2) {
    if (r1 <= 0) return 1.0;
    const double thr1 = spectral_threshold(cfg.Y1, r1, cfg.tau_s, cfg.W_hz);
    const double thr2 = spectral_threshold(cfg.Y2, r2, cfg.tau_s, cfg.W_hz);
    return sic_decode_success(cfg.P_w, cfg.beta1, cfg.sigma1_sq_w, v2, v1, thr2, thr1);
}

std::pair<double, double> user_success_probs(const ScenarioConfig& cfg, const Action& a) {
    const PowerPair p = cfg.power_set.at(static_cast<std::size_t>(a.power_idx));
    if (a.order == DecodingOrder::Order12) {
        return {p_u1_success_order12(cfg, p.v1, p.v2, a.r1),
                p_u2_success_order12(cfg, p.v1, p.v2, a.r1, a.r2)};
    }
    return {p_u1_success_order21(cfg, p.v1, p.v2, a.r1, a.r2),
            p_u2_success_order21(cfg, p.v1, p.v2, a.r2)};
}

OutcomeDistribution outcome_distribution(const ScenarioConfig& cfg, const Action& a) {
    const auto [p1, p2] = user_success_probs(cfg, a);
    OutcomeDistribution d;
    d.p_11 = p1 * p2;
    d.p_10 = p1 * (1.0 - p2);
    d.p_01 = (1.0 - p1) * p2;
    d.p_00 = (1.0 - p1) * (1.0 - p2);
    return d;
}

std::vector<Action> enumerate_actions(const ScenarioConfig& cfg, OrderFilter filter) {
    std::vector<DecodingOrder> orders;
    if (filter != OrderFilter::Order21Only) orders.push_back(DecodingOrder::Order12);
    if (filter != OrderFilter::Order12Only) orders.push_back(DecodingOrder::Order21);

    std::vector<Action> out;
    out.reserve(orders.size() * cfg.power_set.size() * cfg.rate_set_1.size() *
                cfg.rate_set_2.size());
    for (DecodingOrder order : orders) {
        for (std::size_t l = 0; l < cfg.power_set.size(); ++l) {
            for (int r1 : cfg.rate_set_1) {
                for (int r2 : cfg.rate_set_2) {
                    out.push_back(Action{order, static_cast<int>(l), r1, r2});
                }
            }
        }
    }
    return out;
}

}  // namespace noma
