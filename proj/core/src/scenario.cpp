#include "noma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace noma {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split_char;
using detail::split_ws;
using detail::trim;

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

double spectral_threshold(int packet_bits, int rate_pkts, double tau_s, double W_hz) {
    const double bits = static_cast<double>(packet_bits) * static_cast<double>(rate_pkts);
    return std::exp2(bits / (tau_s * W_hz)) - 1.0;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

}  // namespace

void ScenarioConfig::validate() {
    require(T >= 1, "T must be a positive integer, got " + std::to_string(T));
    require(N >= 1, "N must be a positive integer, got " + std::to_string(N));
    require(delta >= 0.0 && delta <= 1.0,
            "delta must lie in [0,1], got " + format_double(delta));
    require(tau_s > 0.0, "tau_s must be positive, got " + format_double(tau_s));
    require(W_hz > 0.0, "W_hz must be positive, got " + format_double(W_hz));
    require(beta1 > 0.0, "beta1 must be positive, got " + format_double(beta1));
    require(beta2 > 0.0, "beta2 must be positive, got " + format_double(beta2));
    require(Y1 >= 1, "Y1 must be a positive integer, got " + std::to_string(Y1));
    require(Y2 >= 1, "Y2 must be a positive integer, got " + std::to_string(Y2));

    require(!power_set.empty(), "power_set must not be empty");
    for (std::size_t i = 0; i < power_set.size(); ++i) {
        const auto& [v1, v2] = power_set[i];
        const std::string where = "power_set[" + std::to_string(i) + "]";
        require(v1 >= 0.0 && v2 >= 0.0,
                where + ": fractions must be nonnegative, got (" + format_double(v1) +
                    "," + format_double(v2) + ")");
        require(v1 + v2 <= 1.0, where + ": v1 + v2 = " + format_double(v1 + v2) +
                                    " exceeds the total power budget 1");
    }

    auto check_rates = [&](const std::vector<int>& rates, const std::string& name) {
        require(!rates.empty(), name + " must not be empty");
        require(rates.front() == 0, name + " must contain 0 as its first element");
        for (std::size_t i = 1; i < rates.size(); ++i) {
            require(rates[i] > rates[i - 1], name + " must be strictly increasing");
        }
    };
    check_rates(rate_set_1, "rate_set_1");
    check_rates(rate_set_2, "rate_set_2");

    P_w = dbm_to_watt(P_dbm);
    sigma1_sq_w = dbm_to_watt(sigma1_sq_dbm);
    sigma2_sq_w = dbm_to_watt(sigma2_sq_dbm);
    require(P_w > 0.0 && sigma1_sq_w > 0.0 && sigma2_sq_w > 0.0,
            "converted powers must be strictly positive");
}

namespace {

std::vector<PowerPair> parse_power_set(std::string_view value, const std::string& where) {
    std::vector<PowerPair> out;
    for (auto token : split_ws(value)) {
        if (token.size() < 2 || token.front() != '(' || token.back() != ')') {
            fail(where + ": power pair '" + std::string(token) +
                 "' must have the form (v1,v2)");
        }
        auto inner = token.substr(1, token.size() - 2);
        auto parts = split_char(inner, ',');
        PowerPair p;
        if (parts.size() != 2 || !parse_double(parts[0], p.v1) || !parse_double(parts[1], p.v2)) {
            fail(where + ": power pair '" + std::string(token) +
                 "' must have the form (v1,v2)");
        }
        out.push_back(p);
    }
    if (out.empty()) fail(where + ": power_set must list at least one pair");
    return out;
}

std::vector<int> parse_rate_list(std::string_view value, const std::string& where) {
    std::vector<int> out;
    for (auto token : split_ws(value)) {
        int r = 0;
        if (!parse_int(token, r)) {
            fail(where + ": rate '" + std::string(token) + "' is not an integer");
        }
        out.push_back(r);
    }
    if (out.empty()) fail(where + ": rate set must list at least one rate");
    return out;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open config file");

    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = trim(sv);
        if (sv.empty()) continue;

        const std::string where = path + ":" + std::to_string(lineno);
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) fail(where + ": expected 'key = value'");
        const std::string key{trim(sv.substr(0, eq))};
        const std::string_view value = trim(sv.substr(eq + 1));
        if (key.empty()) fail(where + ": empty key");
        if (!seen.insert(key).second) fail(where + ": duplicate key '" + key + "'");

        auto want_int = [&](int& dst) {
            if (!parse_int(value, dst))
                fail(where + ": value '" + std::string(value) + "' is not an integer");
        };
        auto want_double = [&](double& dst) {
            if (!parse_double(value, dst))
                fail(where + ": value '" + std::string(value) + "' is not a number");
        };

        if (key == "T") want_int(cfg.T);
        else if (key == "N") want_int(cfg.N);
        else if (key == "delta") want_double(cfg.delta);
        else if (key == "tau_s") want_double(cfg.tau_s);
        else if (key == "W_hz") want_double(cfg.W_hz);
        else if (key == "P_dbm") want_double(cfg.P_dbm);
        else if (key == "beta1") want_double(cfg.beta1);
        else if (key == "beta2") want_double(cfg.beta2);
        else if (key == "sigma1_sq_dbm") want_double(cfg.sigma1_sq_dbm);
        else if (key == "sigma2_sq_dbm") want_double(cfg.sigma2_sq_dbm);
        else if (key == "Y1") want_int(cfg.Y1);
        else if (key == "Y2") want_int(cfg.Y2);
        else if (key == "power_set") cfg.power_set = parse_power_set(value, where);
        else if (key == "rate_set_1") cfg.rate_set_1 = parse_rate_list(value, where);
        else if (key == "rate_set_2") cfg.rate_set_2 = parse_rate_list(value, where);
        else fail(where + ": unknown key '" + key + "'");
    }

    static const char* required[] = {
        "T", "N", "delta", "tau_s", "W_hz", "P_dbm", "beta1", "beta2",
        "sigma1_sq_dbm", "sigma2_sq_dbm", "Y1", "Y2", "power_set",
        "rate_set_1", "rate_set_2",
    };
    for (const char* key : required) {
        if (!seen.count(key)) fail(path + ": missing required key '" + std::string(key) + "'");
    }

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        fail(path + ": " + e.what());
    }
    return cfg;
}

}  // namespace noma
