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
#include "oracles.hpp"

#include <qisim/channel.hpp>
#include <qisim/correlator.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

using namespace qisim;

namespace {

ExperimentConfig silent_config() {
    ExperimentConfig c;
    c.source.mu = 0.0;
    c.source.noise_herald_per_bin = 0.0;
    c.channel.background_per_bin = 0.0;
    c.channel.dark_signal_per_bin = 0.0;
    c.channel.stray_signal_per_bin = 0.0;
    return c;
}

ExperimentConfig perfect_config(double mu) {
    ExperimentConfig c = silent_config();
    c.source.mu = mu;
    c.source.eta_herald = 1.0;
    c.channel.eta_transmit = 1.0;
    c.channel.target_reflectivity = 1.0;
    c.channel.collection_fraction = 1.0;
    c.channel.eta_signal_detector = 1.0;
    return c;
}

} // namespace

TEST(CollectionFractionMax, Examples) {
    EXPECT_NEAR(collection_fraction_max(0.03, 0.32), 1.0986328125e-3, 1e-12);
    EXPECT_EQ(collection_fraction_max(0.0, 0.32), 0.0);
    for (double x : {1e-3, 0.5, 7.0}) EXPECT_DOUBLE_EQ(collection_fraction_max(x, x), 0.125);
    EXPECT_THROW(collection_fraction_max(0.03, 0.0), DomainError);
}

TEST(SimulateCounts, NoPhotonsNoCounts) {
    Rng rng = make_stream(1);
    const ClickCounts c = simulate_counts(silent_config(), true, 10'000'000, rng);
    EXPECT_EQ(c.n_pulses, 10'000'000u);
    EXPECT_EQ(c.n_signal_clicks, 0u);
    EXPECT_EQ(c.n_herald_clicks, 0u);
    EXPECT_EQ(c.n_coincidences, 0u);
}

TEST(SimulateCounts, PerfectCorrelationLimit) {
    Rng rng = make_stream(2);
    const std::uint64_t n = 10'000'000;
    const ClickCounts c = simulate_counts(perfect_config(0.01), true, n, rng);
    const double p = -std::expm1(-0.01);
    EXPECT_NEAR(p, 9.95e-3, 1e-5);
    EXPECT_TRUE(oracle::within_sigmas(static_cast<double>(c.n_coincidences), n * p, oracle::binomial_sigma(n, p)));
    EXPECT_EQ(c.n_coincidences, c.n_signal_clicks);
    EXPECT_EQ(c.n_coincidences, c.n_herald_clicks);
}

TEST(SimulateCounts, TargetOutGivesAccidentalsOnly) {
    ExperimentConfig cfg = silent_config();
    cfg.source.mu = 0.01;
    cfg.source.eta_herald = 0.1;
    cfg.channel.background_per_bin = 1e-4;
    const std::uint64_t n = 100'000'000;
    Rng rng = make_stream(3);
    const ClickCounts c = simulate_counts(cfg, false, n, rng);

    const double p_h = -std::expm1(-0.01 * 0.1);
    const double p_b = -std::expm1(-1e-4);
    EXPECT_TRUE(oracle::within_sigmas(static_cast<double>(c.n_coincidences), n * p_h * p_b,
                                      oracle::binomial_sigma(n, p_h * p_b)));

    // Same check against the empirical singles: ratio -> 1.
    const double ratio = static_cast<double>(c.n_coincidences) * n /
                         (static_cast<double>(c.n_signal_clicks) * static_cast<double>(c.n_herald_clicks));
    EXPECT_TRUE(oracle::within_sigmas(ratio, 1.0, 1.0 / std::sqrt(static_cast<double>(c.n_coincidences))));
}

TEST(SimulateCounts, FourPatternsMatchPoissonSeries) {
    Rng pick = make_stream(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::uint64_t n = 10'000'000;
    for (int trial = 0; trial < 10; ++trial) {
        ExperimentConfig cfg;
        cfg.source.mu = 0.05 * u(pick);
        cfg.source.eta_herald = u(pick);
        cfg.source.noise_herald_per_bin = 1e-3 * u(pick);
        cfg.channel.eta_transmit = u(pick);
        cfg.channel.collection_fraction = u(pick);
        cfg.channel.background_per_bin = 1e-3 * u(pick);
        const bool in = trial % 2 == 0;
        const oracle::Patterns p = oracle::click_patterns_by_series(cfg, in);
        Rng rng = make_stream(5, {static_cast<std::uint64_t>(trial)});
        const ClickCounts c = simulate_counts(cfg, in, n, rng);
        const double n11 = static_cast<double>(c.n_coincidences);
        const double n10 = static_cast<double>(c.n_signal_clicks) - n11;
        const double n01 = static_cast<double>(c.n_herald_clicks) - n11;
        const double n00 = n - n11 - n10 - n01;
        EXPECT_TRUE(oracle::within_sigmas(n11, n * p.p11, oracle::binomial_sigma(n, p.p11))) << trial;
        EXPECT_TRUE(oracle::within_sigmas(n10, n * p.p10, oracle::binomial_sigma(n, p.p10))) << trial;
        EXPECT_TRUE(oracle::within_sigmas(n01, n * p.p01, oracle::binomial_sigma(n, p.p01))) << trial;
        EXPECT_TRUE(oracle::within_sigmas(n00, n * p.p00, oracle::binomial_sigma(n, p.p00))) << trial;
    }
}

TEST(SimulateCounts, SignalClicksNonDecreasingInMu) {
    ExperimentConfig cfg;
    cfg.channel.collection_fraction = 0.01;
    const std::uint64_t n = 10'000'000;
    double prev_expected = -1.0;
    double prev_observed = -1.0;
    double prev_sigma = 0.0;
    for (double mu : {1e-3, 5e-3, 1e-2, 1.5e-2, 2.5e-2}) {
        cfg.source.mu = mu;
        const double p = click_probabilities(cfg.source, cfg.channel, true).p_signal;
        Rng rng = make_stream(6, {std::bit_cast<std::uint64_t>(mu)});
        const auto observed = static_cast<double>(simulate_counts(cfg, true, n, rng).n_signal_clicks);
        const double sigma = oracle::binomial_sigma(n, p);
        EXPECT_GE(n * p, prev_expected);
        EXPECT_TRUE(oracle::within_sigmas(observed, n * p, sigma));
        // Empirically non-decreasing up to the combined statistical spread.
        EXPECT_GT(observed, prev_observed - oracle::kSigmas * std::hypot(sigma, prev_sigma));
        prev_expected = n * p;
        prev_observed = observed;
        prev_sigma = sigma;
    }
}

TEST(SimulateCounts, DeterministicForFixedSeed) {
    const ExperimentConfig cfg;
    Rng a = make_stream(7);
    Rng b = make_stream(7);
    EXPECT_EQ(simulate_counts(cfg, true, 123'456'789, a), simulate_counts(cfg, true, 123'456'789, b));
}

TEST(SimulateTags, AllRatesZeroGivesEmptyStream) {
    Rng rng = make_stream(8);
    const TimeTagStream s = simulate_tags(silent_config(), true, 100'000, rng);
    EXPECT_TRUE(s.tags.empty());
    EXPECT_EQ(s.duration_ps, 100'001u * 12'500u);
}

TEST(SimulateTags, SortedWithinDurationAndDeterministic) {
    Rng pick = make_stream(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        ExperimentConfig cfg = perfect_config(0.3 * u(pick));
        cfg.source.noise_herald_per_bin = 0.05 * u(pick);
        cfg.channel.background_per_bin = 0.05 * u(pick);
        cfg.channel.dark_signal_per_bin = 0.05 * u(pick);
        cfg.channel.stray_signal_per_bin = 0.05 * u(pick);
        cfg.channel.jitter_sigma_ps = 3000 * u(pick);
        cfg.channel.dead_time_ps = trial % 3 == 0 ? 20000 : 0;
        Rng a = make_stream(10, {static_cast<std::uint64_t>(trial)});
        Rng b = make_stream(10, {static_cast<std::uint64_t>(trial)});
        const TimeTagStream s = simulate_tags(cfg, trial % 2 == 0, 20'000, a);
        EXPECT_TRUE(is_well_formed(s)) << trial;
        EXPECT_EQ(s, simulate_tags(cfg, trial % 2 == 0, 20'000, b)) << trial;
        // Click semantics: at most one tag per channel per bin.
        const ClickCounts c = bin_and_count(s, cfg.channel.bin_width_ps, 12500);
        std::uint64_t in_bins[2] = {0, 0};
        const PulseGrid grid = pulse_grid(cfg);
        for (const TimeTag& t : s.tags) {
            const auto k = grid.bin_of(t.time_ps);
            if (k && *k >= 1 && *k <= 20'000) ++in_bins[static_cast<int>(t.channel)];
        }
        EXPECT_EQ(c.n_signal_clicks, in_bins[0]) << trial;
        EXPECT_EQ(c.n_herald_clicks, in_bins[1]) << trial;
    }
}

TEST(SimulateTags, DeadTimeSeparatesTagsOnEachChannel) {
    ExperimentConfig cfg = perfect_config(2.0);
    cfg.channel.dead_time_ps = 30'000;
    Rng rng = make_stream(11);
    const TimeTagStream s = simulate_tags(cfg, true, 50'000, rng);
    std::uint64_t last[2] = {0, 0};
    bool seen[2] = {false, false};
    for (const TimeTag& t : s.tags) {
        const int ch = static_cast<int>(t.channel);
        if (seen[ch]) {
            EXPECT_GE(t.time_ps - last[ch], 30'000u);
        }
        seen[ch] = true;
        last[ch] = t.time_ps;
    }
}

TEST(SimulateTags, BinnedTagsMatchAggregateMode) {
    // Paired runs: same parameters, independent streams; all three tallies within 4 sigma.
    ExperimentConfig cfg;
    cfg.source.mu = 0.02;
    cfg.source.eta_herald = 0.3;
    cfg.source.noise_herald_per_bin = 1e-3;
    cfg.channel.collection_fraction = 0.1;
    cfg.channel.background_per_bin = 2e-3;
    cfg.channel.dark_signal_per_bin = 1e-3;
    const std::uint64_t n = 1'000'000;
    for (std::uint64_t run = 0; run < 5; ++run) {
        Rng rt = make_stream(12, {run, 0});
        Rng ra = make_stream(12, {run, 1});
        const ClickCounts tags = bin_and_count(simulate_tags(cfg, true, n, rt), 2000, 12500);
        const ClickCounts agg = simulate_counts(cfg, true, n, ra);
        ASSERT_EQ(tags.n_pulses, n);
        const auto check = [&](std::uint64_t a, std::uint64_t b) {
            const double sigma = std::sqrt(static_cast<double>(a + b)); // two independent draws
            return oracle::within_sigmas(static_cast<double>(a), static_cast<double>(b), sigma);
        };
        EXPECT_TRUE(check(tags.n_signal_clicks, agg.n_signal_clicks)) << run;
        EXPECT_TRUE(check(tags.n_herald_clicks, agg.n_herald_clicks)) << run;
        EXPECT_TRUE(check(tags.n_coincidences, agg.n_coincidences)) << run;
    }
}
