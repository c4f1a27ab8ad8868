#include "bcpnn/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bcpnn/errors.hpp"
#include "json.hpp"

namespace bcpnn {

Layout::Layout(std::vector<int> hc_sizes) : sizes(std::move(hc_sizes)) {
    offsets.reserve(sizes.size());
    for (int m : sizes) {
        offsets.push_back(total);
        total += m;
    }
}

Layout NetworkConfig::input_layout() const {
    std::vector<int> sizes;
    sizes.reserve(input.size());
    for (const auto& a : input) sizes.push_back(static_cast<int>(a.states.size()));
    return Layout(std::move(sizes));
}

Layout NetworkConfig::hidden_layout() const {
    std::vector<int> sizes;
    sizes.reserve(hidden.size());
    for (const auto& a : hidden) sizes.push_back(static_cast<int>(a.states.size()));
    return Layout(std::move(sizes));
}

void NetworkConfig::validate() const {
    if (input.empty()) throw ConfigError("config: at least one input hypercolumn required");
    if (hidden.empty()) throw ConfigError("config: at least one hidden hypercolumn required");
    for (const auto& a : input) {
        if (a.states.size() < 2)
            throw ConfigError("config: input attribute '" + a.name + "' needs >= 2 states");
    }
    for (const auto& a : hidden) {
        if (a.states.size() < 2)
            throw ConfigError("config: hidden attribute '" + a.name + "' needs >= 2 states");
    }
    if (connectivity.size() != input.size() * hidden.size())
        throw ConfigError("config: connectivity prior has wrong shape");
    for (uint8_t c : connectivity) {
        if (c != 0 && c != 1) throw ConfigError("config: connectivity entries must be 0 or 1");
    }
    for (size_t j = 0; j < hidden.size(); ++j) {
        int indegree = 0;
        for (size_t i = 0; i < input.size(); ++i) indegree += prior(static_cast<int>(i), static_cast<int>(j));
        if (indegree == 0)
            throw ConfigError("config: hidden hypercolumn '" + hidden[j].name +
                              "' has no active incoming connection");
    }
    if (!(rho > 1.0)) throw ConfigError("config: rho must be > 1");
    if (!(tau_p > 0.0)) throw ConfigError("config: tau_p must be > 0");
    if (!(epsilon_floor > 0.0)) throw ConfigError("config: epsilon_floor must be > 0");
    if (!(settle_tolerance > 0.0)) throw ConfigError("config: settle tolerance must be > 0");
    if (max_settle_steps < 1) throw ConfigError("config: max settle steps must be >= 1");
    if (!(dt_ms > 0.0)) throw ConfigError("config: dt_ms must be > 0");
    if (!(tau_zi_ms > 0.0) || !(tau_zj_ms > 0.0))
        throw ConfigError("config: z time constants must be > 0");
    if (label_hypercolumn < 0 || label_hypercolumn >= static_cast<int>(hidden.size()))
        throw ConfigError("config: label hypercolumn out of range");
    if (structural_period < 1) throw ConfigError("config: structural period must be >= 1");
}

namespace {

std::vector<AttributeSpec> parse_attributes(const nlohmann::json& arr, const char* side) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError(std::string("config: '") + side + "' must be a non-empty array");
    std::vector<AttributeSpec> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        AttributeSpec spec;
        if (item.contains("name")) spec.name = item.at("name").get<std::string>();
        if (item.contains("states")) {
            const auto& st = item.at("states");
            if (st.is_number_integer()) {
                const int m = st.get<int>();
                for (int k = 0; k < m; ++k) spec.states.push_back("s" + std::to_string(k));
            } else {
                spec.states = st.get<std::vector<std::string>>();
            }
        }
        if (spec.name.empty()) spec.name = std::string(side) + std::to_string(out.size());
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace

NetworkConfig NetworkConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    NetworkConfig cfg;
    try {
        cfg.input = parse_attributes(j.at("input"), "input");
        cfg.hidden = parse_attributes(j.at("hidden"), "hidden");

        const size_t hi = cfg.input.size(), hh = cfg.hidden.size();
        if (!j.contains("connectivity") || (j["connectivity"].is_string() &&
                                            j["connectivity"].get<std::string>() == "full")) {
            cfg.connectivity.assign(hi * hh, 1);
        } else {
            const auto& rows = j.at("connectivity");
            if (rows.size() != hi) throw ConfigError("config: connectivity needs one row per input hc");
            cfg.connectivity.assign(hi * hh, 0);
            for (size_t i = 0; i < hi; ++i) {
                if (rows[i].size() != hh)
                    throw ConfigError("config: connectivity row has wrong length");
                for (size_t jj = 0; jj < hh; ++jj)
                    cfg.connectivity[i * hh + jj] = rows[i][jj].get<int>() ? 1 : 0;
            }
        }

        if (j.contains("rho")) {
            if (j["rho"].is_string() && j["rho"].get<std::string>() == "inf")
                cfg.rho = std::numeric_limits<double>::infinity();
            else
                cfg.rho = j["rho"].get<double>();
        }
        if (j.contains("tau_p")) cfg.tau_p = j["tau_p"].get<double>();
        if (j.contains("anneal")) cfg.anneal = j["anneal"].get<bool>();
        if (j.contains("epsilon_floor")) cfg.epsilon_floor = j["epsilon_floor"].get<double>();
        if (j.contains("structural_period")) cfg.structural_period = j["structural_period"].get<int>();
        if (j.contains("recurrence")) {
            const auto& r = j["recurrence"];
            if (r.is_boolean()) {
                cfg.recurrence = r.get<bool>();
            } else {
                cfg.recurrence = r.value("enabled", true);
                cfg.max_settle_steps = r.value("max_steps", cfg.max_settle_steps);
                cfg.settle_tolerance = r.value("tolerance", cfg.settle_tolerance);
            }
        }
        if (j.contains("spiking")) {
            const auto& s = j["spiking"];
            cfg.spiking = true;
            cfg.dt_ms = s.value("dt_ms", cfg.dt_ms);
            cfg.f_max_hz = s.value("f_max", cfg.f_max_hz);
            cfg.tau_zi_ms = s.value("tau_zi", cfg.tau_zi_ms);
            cfg.tau_zj_ms = s.value("tau_zj", cfg.tau_zj_ms);
            cfg.spike_tau_p = s.value("tau_p_steps", cfg.spike_tau_p);
        }
        if (j.contains("label_hypercolumn")) cfg.label_hypercolumn = j["label_hypercolumn"].get<int>();
        if (j.contains("purpose")) cfg.purpose = j["purpose"].get<std::string>();
        if (j.contains("declared_at")) cfg.declared_at = j["declared_at"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

NetworkConfig NetworkConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

NetworkConfig NetworkConfig::make(const std::vector<int>& input_sizes,
                                  const std::vector<int>& hidden_sizes) {
    NetworkConfig cfg;
    for (size_t i = 0; i < input_sizes.size(); ++i) {
        AttributeSpec a;
        a.name = "in" + std::to_string(i);
        for (int k = 0; k < input_sizes[i]; ++k) a.states.push_back("s" + std::to_string(k));
        cfg.input.push_back(std::move(a));
    }
    for (size_t jx = 0; jx < hidden_sizes.size(); ++jx) {
        AttributeSpec a;
        a.name = "hid" + std::to_string(jx);
        for (int k = 0; k < hidden_sizes[jx]; ++k) a.states.push_back("s" + std::to_string(k));
        cfg.hidden.push_back(std::move(a));
    }
    cfg.connectivity.assign(input_sizes.size() * hidden_sizes.size(), 1);
    cfg.validate();
    return cfg;
}

}  // namespace bcpnn
