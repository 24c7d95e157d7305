#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace noma {

/// Raised by config loading and validation. The message names the file
/// location (when known) and the violated rule.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One entry of the transmit power split set: fractions of the total
/// power P assigned to user 1 and user 2. Requires v1, v2 >= 0 and
/// v1 + v2 <= 1; a sum below 1 simply leaves power unused (the split
/// (0, 0) transmits nothing and is a legal choice).
struct PowerPair {
    double v1 = 0.0;
    double v2 = 0.0;
};

/// All physical and problem parameters of a two-user downlink scenario.
///
/// Powers are stored in dBm as configured; validate() converts them to
/// watts once (watts = 10^((dBm-30)/10)) and every downstream formula
/// works in SI units. Immutable after load; safe to share across
/// threads by const reference.
struct ScenarioConfig {
    int T = 0;      ///< horizon, slots
    int N = 0;      ///< packets user 1 must receive within T slots
    double delta = 0.0;  ///< delivery outage probability threshold, in [0,1]
    double tau_s = 0.0;  ///< slot length, seconds
    double W_hz = 0.0;   ///< bandwidth, Hz
    double P_dbm = 0.0;  ///< total transmit power, dBm

    double beta1 = 0.0;  ///< large-scale fading gain, user 1
    double beta2 = 0.0;  ///< large-scale fading gain, user 2
    double sigma1_sq_dbm = 0.0;  ///< noise-plus-interference power at user 1, dBm
    double sigma2_sq_dbm = 0.0;  ///< noise-plus-interference power at user 2, dBm

    int Y1 = 0;  ///< packet size of user 1, bits
    int Y2 = 0;  ///< packet size of user 2, bits

    std::vector<PowerPair> power_set;   ///< ordered power split choices
    std::vector<int> rate_set_1;        ///< target rates of user 1, packets/slot
    std::vector<int> rate_set_2;        ///< target rates of user 2, packets/slot

    // Derived SI quantities, filled by validate().
    double P_w = 0.0;
    double sigma1_sq_w = 0.0;
    double sigma2_sq_w = 0.0;

    /// Time-bandwidth product tau*W of one slot (the per-slot symbol budget).
    double symbols_per_slot() const { return tau_s * W_hz; }

    int max_rate_1() const { return rate_set_1.empty() ? 0 : rate_set_1.back(); }
    int max_rate_2() const { return rate_set_2.empty() ? 0 : rate_set_2.back(); }

    /// Checks every invariant and fills the watt-valued fields.
    /// Throws ConfigError naming the first violated rule.
    void validate();
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

/// SINR threshold for carrying `rate_pkts` packets of `packet_bits` bits
/// in one slot: 2^(Y*r/(tau*W)) - 1. Zero iff rate_pkts*packet_bits == 0,
/// strictly increasing in both.
double spectral_threshold(int packet_bits, int rate_pkts, double tau_s, double W_hz);

/// Loads and validates a scenario from a flat key/value text file
/// (see docs/config-format.md). Unknown keys, missing keys, malformed
/// values, and invariant violations all raise ConfigError.
ScenarioConfig load_config(const std::string& path);

}  // namespace noma
