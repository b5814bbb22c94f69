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

#include <qisim/analytics.hpp>
#include <qisim/error.hpp>
#include <qisim/model.hpp>
#include <qisim/random.hpp>
#include <qisim/source.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

namespace qisim {

/// Largest collectable fraction of isotropically scattered light: d^2 / (8 D^2).
inline double collection_fraction_max(double d_m, double dist_m) {
    if (!(dist_m > 0.0)) throw DomainError("collection fraction undefined: zero distance");
    if (d_m < 0.0) throw DomainError("collection fraction undefined: negative aperture");
    return d_m * d_m / (8.0 * dist_m * dist_m);
}

/// Draw category counts from Multinomial(n; p) by sequential conditional binomials.
template <std::size_t K>
std::array<std::uint64_t, K> sample_multinomial(std::uint64_t n, const std::array<double, K>& p, Rng& rng) {
    std::array<std::uint64_t, K> out{};
    double remaining_p = 1.0;
    std::uint64_t remaining_n = n;
    for (std::size_t i = 0; i + 1 < K && remaining_n > 0; ++i) {
        const double q = remaining_p > 0.0 ? std::clamp(p[i] / remaining_p, 0.0, 1.0) : 0.0;
        std::uint64_t k = 0;
        if (q >= 1.0) {
            k = remaining_n;
        } else if (q > 0.0) {
            std::binomial_distribution<std::uint64_t> draw(remaining_n, q);
            k = draw(rng);
        }
        out[i] = k;
        remaining_n -= k;
        remaining_p -= p[i];
    }
    out[K - 1] += remaining_n;
    return out;
}

/// Aggregate-mode acquisition: one multinomial draw over the four click patterns. Exact for
/// the click model, O(1) in `n_pulses`.
inline ClickCounts simulate_counts(const ExperimentConfig& config, bool target_in, std::uint64_t n_pulses, Rng& rng) {
    const ClickPatterns p = click_patterns(config.source, config.channel, target_in);
    const auto n = sample_multinomial<4>(n_pulses, {p.both, p.signal_only, p.herald_only, p.neither}, rng);
    ClickCounts c;
    c.n_pulses = n_pulses;
    c.n_coincidences = n[0];
    c.n_signal_clicks = n[0] + n[1];
    c.n_herald_clicks = n[0] + n[2];
    c.target_in = target_in;
    return c;
}

enum class Channel : std::uint8_t { Signal = 0, Herald = 1 };

struct TimeTag {
    Channel channel = Channel::Signal;
    std::uint64_t time_ps = 0;

    bool operator==(const TimeTag&) const = default;
    friend bool operator<(const TimeTag& a, const TimeTag& b) {
        return std::tie(a.time_ps, a.channel) < std::tie(b.time_ps, b.channel);
    }
};

/// Time-ordered detection record of one acquisition. Ties order Signal before Herald.
struct TimeTagStream {
    std::vector<TimeTag> tags;
    std::uint64_t duration_ps = 0;

    bool operator==(const TimeTagStream&) const = default;
};

inline bool is_well_formed(const TimeTagStream& stream) {
    if (!std::is_sorted(stream.tags.begin(), stream.tags.end())) return false;
    return stream.tags.empty() || stream.tags.back().time_ps < stream.duration_ps;
}

namespace detail {

/// Keep the first tag per channel per bin, then drop tags inside a detector's dead time.
inline void apply_click_semantics(std::vector<TimeTag>& tags, const PulseGrid& grid, Picoseconds dead_time_ps) {
    std::array<std::uint64_t, 2> last_bin{~0ULL, ~0ULL};
    std::array<std::uint64_t, 2> last_time{0, 0};
    std::array<bool, 2> any{false, false};
    std::size_t kept = 0;
    for (const TimeTag& tag : tags) {
        const auto ch = static_cast<std::size_t>(tag.channel);
        if (dead_time_ps > 0 && any[ch] && tag.time_ps - last_time[ch] < static_cast<std::uint64_t>(dead_time_ps))
            continue;
        const auto bin = grid.bin_of(tag.time_ps);
        if (bin && *bin == last_bin[ch]) continue;
        last_bin[ch] = bin ? *bin : ~0ULL;
        last_time[ch] = tag.time_ps;
        any[ch] = true;
        tags[kept++] = tag;
    }
    tags.resize(kept);
}

} // namespace detail

/// Time-tag-mode acquisition. Pulse k = 1..n_pulses fires at k * period. Photon-induced and
/// jamming clicks are pulse-timed with Gaussian jitter; darks and stray light are uniform
/// over the run. At most one tag per channel per bin survives.
template <class PairStats = PoissonPairs>
TimeTagStream simulate_tags(const ExperimentConfig& config, bool target_in, std::uint64_t n_pulses, Rng& rng) {
    const SourceParams& src = config.source;
    const ChannelParams& ch = config.channel;
    const PulseGrid grid = pulse_grid(config);

    TimeTagStream stream;
    stream.duration_ps = grid.duration_for(n_pulses);

    typename PairStats::Sampler pairs(src.mu);
    PoissonPairs::Sampler herald_noise(src.noise_herald_per_bin);
    PoissonPairs::Sampler jamming(ch.background_per_bin);
    const double eta_h = src.eta_herald;
    const double eta_s = signal_path_efficiency(ch, target_in);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, ch.jitter_sigma_ps > 0.0 ? ch.jitter_sigma_ps : 1.0);
    const bool use_jitter = ch.jitter_sigma_ps > 0.0;

    auto emit = [&](Channel channel, std::uint64_t pulse_time) {
        double t = static_cast<double>(pulse_time);
        if (use_jitter) t += std::round(jitter(rng));
        if (t < 0.0 || t >= static_cast<double>(stream.duration_ps)) return;
        stream.tags.push_back({channel, static_cast<std::uint64_t>(t)});
    };

    // Binomial thinning of n photons with efficiency eta: P(at least one detected) = 1-(1-eta)^n.
    auto any_detected = [&](std::uint64_t n, double eta) {
        if (n == 0 || eta <= 0.0) return false;
        if (eta >= 1.0) return true;
        return unit(rng) < -std::expm1(static_cast<double>(n) * std::log1p(-eta));
    };

    const auto period = static_cast<std::uint64_t>(grid.period_ps);
    for (std::uint64_t k = 1; k <= n_pulses; ++k) {
        const std::uint64_t n_pairs = pairs(rng);
        const std::uint64_t noise = herald_noise(rng);
        const std::uint64_t jam = jamming(rng);
        if (n_pairs == 0 && noise == 0 && jam == 0) continue;

        // Each pair photon is lost independently in the two arms.
        bool herald_click = noise > 0;
        bool signal_click = jam > 0;
        if (n_pairs > 0) {
            herald_click = herald_click || any_detected(n_pairs, eta_h);
            signal_click = signal_click || any_detected(n_pairs, eta_s);
        }
        const std::uint64_t t = k * period;
        if (signal_click) emit(Channel::Signal, t);
        if (herald_click) emit(Channel::Herald, t);
    }

    // Unpulsed signal-side noise: per-bin mean spread uniformly over the whole run.
    const double unpulsed_per_ps =
        (ch.dark_signal_per_bin + ch.stray_signal_per_bin) / static_cast<double>(grid.bin_width_ps);
    const double expected = unpulsed_per_ps * static_cast<double>(stream.duration_ps);
    if (expected > 0.0) {
        std::poisson_distribution<std::uint64_t> count(expected);
        std::uniform_int_distribution<std::uint64_t> when(0, stream.duration_ps - 1);
        const std::uint64_t n_dark = count(rng);
        for (std::uint64_t i = 0; i < n_dark; ++i) stream.tags.push_back({Channel::Signal, when(rng)});
    }

    std::sort(stream.tags.begin(), stream.tags.end());
    detail::apply_click_semantics(stream.tags, grid, ch.dead_time_ps);
    return stream;
}

} // namespace qisim
