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

#include <qisim/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace qisim {

/// Time is integer picoseconds everywhere.
using Picoseconds = std::int64_t;

/// Photon-pair source statistics. Defaults are the paper-default preset.
struct SourceParams {
    double mu = 5.8e-3;             ///< mean pairs per pulse
    double rep_rate_hz = 80e6;      ///< pulse repetition rate
    double pump_nm = 793.0;
    double signal_nm = 671.0;
    double herald_nm = 970.0;
    double eta_herald = 0.075;      ///< herald-arm detection probability per idler photon
    double noise_herald_per_bin = 2e-7; ///< Raman + dark detections on the herald channel

    bool operator==(const SourceParams&) const = default;
};

/// Standoff geometry, signal-arm efficiencies and noise. Rates are mean detections per bin.
struct ChannelParams {
    double d_m = 0.03;                  ///< collectable mode diameter
    double dist_m = 0.32;               ///< target standoff distance D
    double collection_fraction = 3e-4;  ///< measured fraction R of scattered light collected
    double eta_signal_detector = 0.6;
    double eta_transmit = 0.25;
    double background_per_bin = 0.0;    ///< jamming detections, pulse-timed
    double dark_signal_per_bin = 2e-7;  ///< 100 s^-1 over a 2 ns bin
    Picoseconds bin_width_ps = 2000;
    double target_reflectivity = 0.8;

    // Tag-mode and stray-light extensions.
    double jitter_sigma_ps = 300.0;     ///< per-detector Gaussian timing jitter
    Picoseconds dead_time_ps = 0;       ///< non-paralyzable; 0 disables
    double stray_signal_per_bin = 0.0;  ///< unpulsed room light on the signal detector

    bool operator==(const ChannelParams&) const = default;
};

struct ExperimentConfig {
    SourceParams source;
    ChannelParams channel;
    std::uint64_t n_pulses = 80'000'000;
    std::uint64_t seed = 1;
    std::uint64_t toggle_period_pulses = 80'000'000;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Per-run tallies. At most one click per channel per bin, so every count is <= n_pulses.
struct ClickCounts {
    std::uint64_t n_pulses = 0;
    std::uint64_t n_signal_clicks = 0;
    std::uint64_t n_herald_clicks = 0;
    std::uint64_t n_coincidences = 0;
    bool target_in = false;

    bool operator==(const ClickCounts&) const = default;

    ClickCounts& operator+=(const ClickCounts& other) {
        n_pulses += other.n_pulses;
        n_signal_clicks += other.n_signal_clicks;
        n_herald_clicks += other.n_herald_clicks;
        n_coincidences += other.n_coincidences;
        return *this;
    }

    friend ClickCounts operator+(ClickCounts lhs, const ClickCounts& rhs) { return lhs += rhs; }
};

/// Per-bin click probabilities.
struct BinProbabilities {
    double p_signal = 0.0;
    double p_herald = 0.0;
    double p_coincidence = 0.0;
    double p_background = 0.0;
};

/// Pulse period in picoseconds; 80 MHz gives exactly 12500.
inline Picoseconds pulse_period_ps(double rep_rate_hz) {
    return static_cast<Picoseconds>(std::llround(1e12 / rep_rate_hz));
}

/// Signal-arm detection probability per signal photon; zero with the target removed.
inline double signal_path_efficiency(const ChannelParams& channel, bool target_in) {
    if (!target_in) return 0.0;
    return channel.eta_transmit * channel.target_reflectivity * channel.collection_fraction *
           channel.eta_signal_detector;
}

/// Pulse-locked binning geometry. Pulse k (k >= 1) sits at k*period and owns the window
/// [k*period - width/2, k*period - width/2 + width).
struct PulseGrid {
    Picoseconds period_ps = 12500;
    Picoseconds bin_width_ps = 2000;

    Picoseconds lower_offset() const { return bin_width_ps / 2; }

    /// Pulse index whose bin contains `t`, if any (index 0 is returned for the
    /// half-window before the first pulse; callers treat it as outside the run).
    std::optional<std::uint64_t> bin_of(std::uint64_t t) const {
        const std::uint64_t shifted = t + static_cast<std::uint64_t>(lower_offset());
        const std::uint64_t k = shifted / static_cast<std::uint64_t>(period_ps);
        if (shifted - k * static_cast<std::uint64_t>(period_ps) < static_cast<std::uint64_t>(bin_width_ps)) return k;
        return std::nullopt;
    }

    /// Number of complete bins k >= 1 inside [0, duration).
    std::uint64_t pulses_in(std::uint64_t duration_ps) const {
        const auto upper = static_cast<std::uint64_t>(bin_width_ps - lower_offset());
        if (duration_ps < upper) return 0;
        return (duration_ps - upper) / static_cast<std::uint64_t>(period_ps);
    }

    /// Duration that holds exactly `n_pulses` pulses.
    std::uint64_t duration_for(std::uint64_t n_pulses) const {
        return (n_pulses + 1) * static_cast<std::uint64_t>(period_ps);
    }
};

inline PulseGrid pulse_grid(const ExperimentConfig& config) {
    return PulseGrid{pulse_period_ps(config.source.rep_rate_hz), config.channel.bin_width_ps};
}

namespace detail {

inline void require_probability(double v, const char* field) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, std::string(field) + " out of range");
}

inline void require_rate(double v, const char* field) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, std::string(field) + " out of range");
}

inline void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, std::string(field) + " must be positive");
}

} // namespace detail

/// Returns `raw` unchanged if every invariant holds; throws ConfigError naming the first
/// violated field otherwise.
inline ExperimentConfig validate_config(const ExperimentConfig& raw) {
    const SourceParams& s = raw.source;
    const ChannelParams& c = raw.channel;

    detail::require_rate(s.mu, "mu");
    detail::require_positive(s.rep_rate_hz, "rep_rate_hz");
    detail::require_positive(s.pump_nm, "pump_nm");
    detail::require_positive(s.signal_nm, "signal_nm");
    detail::require_positive(s.herald_nm, "herald_nm");
    detail::require_probability(s.eta_herald, "eta_herald");
    detail::require_rate(s.noise_herald_per_bin, "noise_herald_per_bin");

    detail::require_rate(c.d_m, "d_m");
    detail::require_positive(c.dist_m, "dist_m");
    detail::require_probability(c.collection_fraction, "collection_fraction");
    detail::require_probability(c.eta_signal_detector, "eta_signal_detector");
    detail::require_probability(c.eta_transmit, "eta_transmit");
    detail::require_rate(c.background_per_bin, "background_per_bin");
    detail::require_rate(c.dark_signal_per_bin, "dark_signal_per_bin");
    if (c.bin_width_ps <= 0) throw ConfigError("bin_width_ps", "bin_width_ps must be positive");
    if (c.bin_width_ps > pulse_period_ps(s.rep_rate_hz))
        throw ConfigError("bin_width_ps", "bin exceeds pulse period");
    detail::require_probability(c.target_reflectivity, "target_reflectivity");
    detail::require_rate(c.jitter_sigma_ps, "jitter_sigma_ps");
    if (c.dead_time_ps < 0) throw ConfigError("dead_time_ps", "dead_time_ps out of range");
    detail::require_rate(c.stray_signal_per_bin, "stray_signal_per_bin");

    if (raw.n_pulses < 1) throw ConfigError("n_pulses", "n_pulses must be at least 1");
    if (raw.toggle_period_pulses < 1)
        throw ConfigError("toggle_period_pulses", "toggle_period_pulses must be at least 1");
    return raw;
}

} // namespace qisim
