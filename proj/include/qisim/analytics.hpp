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
#include <qisim/model.hpp>
#include <qisim/random.hpp>
#include <qisim/source.hpp>

#include <cmath>
#include <cstdint>
#include <random>

namespace qisim {

/// Joint click-pattern probabilities for one bin. The four entries sum to one.
struct ClickPatterns {
    double both = 0.0;        ///< signal and herald click (n11)
    double signal_only = 0.0; ///< n10
    double herald_only = 0.0; ///< n01
    double neither = 0.0;     ///< n00
};

namespace detail {

/// Exponents of the no-click probabilities: P(no herald) = e^-herald, P(no signal) = e^-signal,
/// P(neither) = e^-neither = e^-(herald + signal - correlation).
struct NoClickExponents {
    double herald = 0.0;
    double signal = 0.0;
    double neither = 0.0;
    double correlation = 0.0;
};

template <class PairStats>
NoClickExponents no_click_exponents(const SourceParams& source, const ChannelParams& channel, bool target_in) {
    const double mu = source.mu;
    const double eta_h = source.eta_herald;
    const double eta_s = signal_path_efficiency(channel, target_in);
    const double noise_h = source.noise_herald_per_bin;
    const double noise_s = channel.background_per_bin + channel.dark_signal_per_bin + channel.stray_signal_per_bin;

    NoClickExponents e;
    e.herald = noise_h - PairStats::log_pgf(mu, 1.0 - eta_h);
    e.signal = noise_s - PairStats::log_pgf(mu, 1.0 - eta_s);
    e.correlation = PairStats::log_pgf_correlation(mu, eta_h, eta_s);
    e.neither = e.herald + e.signal - e.correlation;
    return e;
}

} // namespace detail

/// Exact per-bin probabilities for non-number-resolving detectors. Pairs follow `PairStats`,
/// every noise term is an independent Poisson process. For Poisson pairs:
///   P_h  = 1 - exp(-(mu eta_h + delta_h))
///   P_s  = 1 - exp(-(mu eta_sig + beta + delta_s))
///   P_sh = P_h + P_s - 1 + exp(-(delta_h + beta + delta_s)) exp(-mu (eta_h + eta_sig - eta_h eta_sig))
/// where delta_s covers darks and stray light and eta_sig is zero with the target out.
template <class PairStats = PoissonPairs>
ClickPatterns click_patterns(const SourceParams& source, const ChannelParams& channel, bool target_in) {
    const auto e = detail::no_click_exponents<PairStats>(source, channel, target_in);
    ClickPatterns p;
    p.neither = std::exp(-e.neither);
    // neither - herald = signal - correlation >= 0 (and likewise), so no cancellation here.
    p.signal_only = p.neither * std::expm1(e.signal - e.correlation);
    p.herald_only = p.neither * std::expm1(e.herald - e.correlation);
    // P_sh = P_s P_h + e^-(herald + signal) (e^correlation - 1): the excess over independence
    // is explicit, so P_sh = P_s P_h holds exactly when either arm sees no pairs.
    p.both = (-std::expm1(-e.signal)) * (-std::expm1(-e.herald)) +
             std::exp(-(e.herald + e.signal)) * std::expm1(e.correlation);
    return p;
}

template <class PairStats = PoissonPairs>
BinProbabilities click_probabilities(const SourceParams& source, const ChannelParams& channel, bool target_in) {
    const auto e = detail::no_click_exponents<PairStats>(source, channel, target_in);
    const ClickPatterns p = click_patterns<PairStats>(source, channel, target_in);
    BinProbabilities b;
    b.p_herald = -std::expm1(-e.herald);
    b.p_signal = -std::expm1(-e.signal);
    b.p_coincidence = p.both;
    b.p_background =
        -std::expm1(-(channel.background_per_bin + channel.dark_signal_per_bin + channel.stray_signal_per_bin));
    return b;
}

/// P_sh / (P_s P_h); throws if either single-channel probability is zero.
inline double analytic_g2(const BinProbabilities& p) {
    if (!(p.p_signal > 0.0) || !(p.p_herald > 0.0)) throw DomainError("g2 undefined: zero singles probability");
    return p.p_coincidence / (p.p_signal * p.p_herald);
}

/// Result of the target-in/target-out signal-to-noise statistic.
struct SnrResult {
    double value = 0.0;
    double std_err = 0.0;
    std::uint64_t n_in = 0;
    std::uint64_t n_out = 0;
};

/// (N_in - N_out) / N_out with the independent-Poisson delta-method error
/// sigma^2 = N_in / N_out^2 + N_in^2 / N_out^3.
inline SnrResult snr_from_counts(std::uint64_t n_in, std::uint64_t n_out) {
    if (n_out == 0) throw DomainError("SNR undefined: zero background counts");
    const double in = static_cast<double>(n_in);
    const double out = static_cast<double>(n_out);
    SnrResult r;
    r.value = in / out - 1.0;
    r.std_err = std::sqrt(in / (out * out) + in * in / (out * out * out));
    r.n_in = n_in;
    r.n_out = n_out;
    return r;
}

/// Parametric bootstrap of the SNR standard deviation: resample both counts as Poisson
/// around the observed values. Cross-check for the delta-method error.
inline double bootstrap_snr_std(std::uint64_t n_in, std::uint64_t n_out, int resamples, Rng& rng) {
    if (n_out == 0) throw DomainError("SNR undefined: zero background counts");
    std::poisson_distribution<std::uint64_t> draw_in(n_in > 0 ? static_cast<double>(n_in) : 1.0);
    std::poisson_distribution<std::uint64_t> draw_out(static_cast<double>(n_out));
    double sum = 0.0;
    double sum_sq = 0.0;
    int used = 0;
    for (int i = 0; i < resamples; ++i) {
        const std::uint64_t a = n_in > 0 ? draw_in(rng) : 0;
        const std::uint64_t b = draw_out(rng);
        if (b == 0) continue;
        const double v = static_cast<double>(a) / static_cast<double>(b) - 1.0;
        sum += v;
        sum_sq += v * v;
        ++used;
    }
    if (used < 2) throw DomainError("bootstrap failed: too few usable resamples");
    const double mean = sum / used;
    return std::sqrt(std::max(0.0, (sum_sq - used * mean * mean) / (used - 1)));
}

/// Classical SNR: eta P_s / P_b.
inline double expected_snr_classical(double eta, double p_s, double p_b) {
    if (!(p_b > 0.0)) throw DomainError("classical SNR undefined: zero background probability");
    return eta * p_s / p_b;
}

/// Quantum SNR: eta P_sh / (P_h P_b). Accidentals are herald clicks coinciding with background.
inline double expected_snr_quantum(double eta, double p_sh, double p_h, double p_b) {
    if (!(p_h > 0.0) || !(p_b > 0.0)) throw DomainError("quantum SNR undefined: zero denominator");
    return eta * p_sh / (p_h * p_b);
}

/// Quantum enhancement factor SNR_q / SNR_c.
inline double qef(double snr_q, double snr_c) {
    if (!(snr_c > 0.0)) throw DomainError("QEF undefined: non-positive classical SNR");
    return snr_q / snr_c;
}

struct QefEstimate {
    double value = 0.0;
    double std_err = 0.0;
};

/// QEF from measured SNRs, errors combined in quadrature (singles and coincidence SNRs
/// treated as independent).
inline QefEstimate qef(const SnrResult& quantum, const SnrResult& classical) {
    QefEstimate q;
    q.value = qef(quantum.value, classical.value);
    const double rel_c = classical.std_err / classical.value;
    const double rel_q = quantum.value != 0.0 ? quantum.std_err / quantum.value : 0.0;
    q.std_err = std::abs(q.value) * std::hypot(rel_c, rel_q);
    if (quantum.value == 0.0) q.std_err = quantum.std_err / classical.value;
    return q;
}

/// Expected in/out QEF of the exact click model:
///   ((P_sh,in - P_h P_b) / (P_h P_b)) / ((P_s,in - P_b) / P_b).
/// The common factor exp(-(beta + delta_s)) cancels, so this equals analytic_g2 of the same
/// channel with signal-side noise removed.
template <class PairStats = PoissonPairs>
double expected_qef(const SourceParams& source, const ChannelParams& channel) {
    const auto e = detail::no_click_exponents<PairStats>(source, channel, true);
    const double noise_s = channel.background_per_bin + channel.dark_signal_per_bin + channel.stray_signal_per_bin;
    const double p_b = -std::expm1(-noise_s);
    const double p_h = -std::expm1(-e.herald);
    // In-minus-out differences taken analytically; subtracting probabilities loses digits
    // once the signal return is small next to the background.
    const double excess_s = std::exp(-noise_s) * -std::expm1(-(e.signal - noise_s));
    const double excess_sh = p_h * excess_s + std::exp(-(e.herald + e.signal)) * std::expm1(e.correlation);
    const double snr_q = excess_sh / (p_h * p_b);
    const double snr_c = excess_s / p_b;
    return qef(snr_q, snr_c);
}

} // namespace qisim
