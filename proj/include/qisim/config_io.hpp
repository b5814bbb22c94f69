/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <qisim/channel.hpp>
#include <qisim/error.hpp>
#include <qisim/model.hpp>
#include <qisim/source.hpp>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Config files are JSON:
// {
//   "source":  { "mu": ..., "rep_rate_hz": ..., "pump_nm": ..., "signal_nm": ..., "herald_nm": ...,
//                "eta_herald": ..., "noise_herald_per_bin": ... },
//   "channel": { "d_m": ..., "dist_m": ..., "collection_fraction": ..., "eta_signal_detector": ...,
//                "eta_transmit": ..., "background_per_bin": ..., "dark_signal_per_bin": ...,
//                "bin_width_ps": ..., "target_reflectivity": ..., "jitter_sigma_ps": ...,
//                "dead_time_ps": ..., "stray_signal_per_bin": ... },
//   "n_pulses": ..., "seed": ..., "toggle_period_pulses": ...
// }
// Missing keys keep the paper-default value; a missing herald_nm is derived from energy
// conservation. Unknown keys are rejected.

namespace qisim {

using Json = nlohmann::json;

inline Json to_json(const ExperimentConfig& c) {
    const SourceParams& s = c.source;
    const ChannelParams& h = c.channel;
    Json j;
    j["source"] = {{"mu", s.mu},
                   {"rep_rate_hz", s.rep_rate_hz},
                   {"pump_nm", s.pump_nm},
                   {"signal_nm", s.signal_nm},
                   {"herald_nm", s.herald_nm},
                   {"eta_herald", s.eta_herald},
                   {"noise_herald_per_bin", s.noise_herald_per_bin}};
    j["channel"] = {{"d_m", h.d_m},
                    {"dist_m", h.dist_m},
                    {"collection_fraction", h.collection_fraction},
                    {"eta_signal_detector", h.eta_signal_detector},
                    {"eta_transmit", h.eta_transmit},
                    {"background_per_bin", h.background_per_bin},
                    {"dark_signal_per_bin", h.dark_signal_per_bin},
                    {"bin_width_ps", h.bin_width_ps},
                    {"target_reflectivity", h.target_reflectivity},
                    {"jitter_sigma_ps", h.jitter_sigma_ps},
                    {"dead_time_ps", h.dead_time_ps},
                    {"stray_signal_per_bin", h.stray_signal_per_bin}};
    j["n_pulses"] = c.n_pulses;
    j["seed"] = c.seed;
    j["toggle_period_pulses"] = c.toggle_period_pulses;
    return j;
}

namespace detail {

class KeyReader {
  public:
    KeyReader(const Json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
        if (!obj_.is_object()) throw ConfigError(section_, section_ + " must be an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            if constexpr (std::is_unsigned_v<T>) {
                if (!it->is_number_unsigned()) throw ConfigError(key, std::string(key) + " out of range");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError(key, std::string(key) + " must be an integer");
            } else if (!it->is_number()) {
                throw ConfigError(key, std::string(key) + " must be a number");
            }
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(key, std::string(key) + " has the wrong type");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    void reject_unknown() const {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key()) && item.key() != "source" && item.key() != "channel")
                throw ConfigError(item.key(), "unknown key '" + item.key() + "' in " + section_);
    }

  private:
    const Json& obj_;
    std::string section_;
    std::set<std::string> seen_;
};

} // namespace detail

/// Parse and validate. Throws ConfigError naming the offending field.
inline ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    detail::KeyReader top(j, "config");
    top.read("n_pulses", c.n_pulses);
    top.read("seed", c.seed);
    top.read("toggle_period_pulses", c.toggle_period_pulses);
    top.reject_unknown();

    if (j.contains("source")) {
        detail::KeyReader s(j["source"], "source");
        s.read("mu", c.source.mu);
        s.read("rep_rate_hz", c.source.rep_rate_hz);
        s.read("pump_nm", c.source.pump_nm);
        s.read("signal_nm", c.source.signal_nm);
        s.read("herald_nm", c.source.herald_nm);
        s.read("eta_herald", c.source.eta_herald);
        s.read("noise_herald_per_bin", c.source.noise_herald_per_bin);
        s.reject_unknown();
        if (!s.has("herald_nm")) {
            try {
                c.source.herald_nm = idler_wavelength(c.source.pump_nm, c.source.signal_nm);
            } catch (const DomainError& e) {
                throw ConfigError("herald_nm", e.what());
            }
        }
    }
    if (j.contains("channel")) {
        detail::KeyReader h(j["channel"], "channel");
        h.read("d_m", c.channel.d_m);
        h.read("dist_m", c.channel.dist_m);
        h.read("collection_fraction", c.channel.collection_fraction);
        h.read("eta_signal_detector", c.channel.eta_signal_detector);
        h.read("eta_transmit", c.channel.eta_transmit);
        h.read("background_per_bin", c.channel.background_per_bin);
        h.read("dark_signal_per_bin", c.channel.dark_signal_per_bin);
        h.read("bin_width_ps", c.channel.bin_width_ps);
        h.read("target_reflectivity", c.channel.target_reflectivity);
        h.read("jitter_sigma_ps", c.channel.jitter_sigma_ps);
        h.read("dead_time_ps", c.channel.dead_time_ps);
        h.read("stray_signal_per_bin", c.channel.stray_signal_per_bin);
        h.reject_unknown();
    }
    return validate_config(c);
}

inline ExperimentConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Named presets ----------------------------------------------------------------------------

/// Isolated environment, reference geometry (D = 32 cm, R = 3e-4), no jamming.
inline ExperimentConfig preset_paper_default() { return ExperimentConfig{}; }

/// Signal fiber straight onto the detector, as in source characterization.
inline ExperimentConfig preset_bare_source() {
    ExperimentConfig c;
    c.channel.eta_transmit = 1.0;
    c.channel.collection_fraction = 1.0;
    c.channel.target_reflectivity = 1.0;
    c.channel.background_per_bin = 0.0;
    return c;
}

/// Collection at the solid-angle limit with 10,000 s^-1 of jamming.
inline ExperimentConfig preset_rmax_jammed() {
    ExperimentConfig c;
    c.channel.collection_fraction = collection_fraction_max(c.channel.d_m, c.channel.dist_m);
    c.channel.eta_transmit = 1.0;
    c.channel.target_reflectivity = 1.0;
    c.channel.background_per_bin = 1e4 / c.source.rep_rate_hz;
    return c;
}

/// Raster imaging: mu = 7.9e-3 and 14,000 s^-1 of jamming.
inline ExperimentConfig preset_imaging_jammed() {
    ExperimentConfig c;
    c.source.mu = 7.9e-3;
    c.channel.background_per_bin = 1.4e4 / c.source.rep_rate_hz;
    return c;
}

/// Desk-scale QEF benchmark: bright herald arm with strong herald noise so that accidental
/// coincidences at 10,000 s^-1 of jamming reach ~1e3 per 4e8 pulses.
inline ExperimentConfig preset_qef_bench() {
    ExperimentConfig c;
    c.source.eta_herald = 0.5;
    c.source.noise_herald_per_bin = 0.02;
    c.channel.eta_transmit = 1.0;
    c.channel.target_reflectivity = 1.0;
    c.channel.collection_fraction = 1.0 / 6.0;
    c.channel.background_per_bin = 1e4 / c.source.rep_rate_hz;
    return c;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"paper-default", "bare-source", "rmax-jammed", "imaging-jammed",
                                                "qef-bench"};
    return names;
}

inline std::optional<ExperimentConfig> preset(const std::string& name) {
    if (name == "paper-default") return preset_paper_default();
    if (name == "bare-source") return preset_bare_source();
    if (name == "rmax-jammed") return preset_rmax_jammed();
    if (name == "imaging-jammed") return preset_imaging_jammed();
    if (name == "qef-bench") return preset_qef_bench();
    return std::nullopt;
}

/// Source-characterization view of a config: same source and detectors, signal fiber
/// connected directly, no jamming.
inline ExperimentConfig characterization_config(ExperimentConfig c) {
    c.channel.eta_transmit = 1.0;
    c.channel.collection_fraction = 1.0;
    c.channel.target_reflectivity = 1.0;
    c.channel.background_per_bin = 0.0;
    c.channel.stray_signal_per_bin = 0.0;
    return c;
}

} // namespace qisim
