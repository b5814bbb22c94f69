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
#include <qisim/channel.hpp>
#include <qisim/correlator.hpp>
#include <qisim/error.hpp>
#include <qisim/model.hpp>
#include <qisim/parallel.hpp>
#include <qisim/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qisim {

enum class SweepVariable { Mu, Background };

inline const char* to_string(SweepVariable v) { return v == SweepVariable::Mu ? "mu" : "background"; }

inline std::optional<SweepVariable> parse_sweep_variable(const std::string& name) {
    if (name == "mu") return SweepVariable::Mu;
    if (name == "background") return SweepVariable::Background;
    return std::nullopt;
}

struct SweepOptions {
    /// Pulses for the jammer-blocked g2 measurement at each row; 0 means dwell / 4.
    std::uint64_t companion_pulses = 0;
    unsigned threads = 1;
};

/// One row of a toggled in/out acquisition. Failed statistics are NaN and `error` holds the
/// first failure message; the counts are always filled.
struct SweepRow {
    double value = 0.0;
    ClickCounts in;
    ClickCounts out;
    SnrResult classical;
    SnrResult quantum;
    QefEstimate qef;
    G2Estimate g2;
    std::optional<std::string> error;
};

struct SweepTable {
    SweepVariable variable = SweepVariable::Mu;
    std::vector<SweepRow> rows; ///< sorted by value
};

inline ExperimentConfig with_sweep_value(ExperimentConfig config, SweepVariable variable, double value) {
    if (variable == SweepVariable::Mu) config.source.mu = value;
    else config.channel.background_per_bin = value;
    return config;
}

/// Target-in/target-out acquisition over `dwell_pulses`, alternating segments of
/// config.toggle_period_pulses. Singles give the classical SNR, coincidences the quantum
/// SNR. Any remainder that does not fill a whole in/out pair is split evenly into one
/// extra shorter pair.
inline void acquire_toggled(const ExperimentConfig& config, std::uint64_t dwell_pulses, std::uint64_t row_key,
                            ClickCounts& in, ClickCounts& out) {
    const std::uint64_t segment = config.toggle_period_pulses;
    const std::uint64_t pairs = dwell_pulses / (2 * segment);
    const std::uint64_t tail = (dwell_pulses - pairs * 2 * segment) / 2;
    in = ClickCounts{};
    out = ClickCounts{};
    in.target_in = true;
    for (std::uint64_t j = 0; j <= pairs; ++j) {
        const std::uint64_t len = j < pairs ? segment : tail;
        if (len == 0) continue;
        Rng rng_in = make_stream(config.seed, {row_key, j, 1});
        in += simulate_counts(config, true, len, rng_in);
        Rng rng_out = make_stream(config.seed, {row_key, j, 0});
        out += simulate_counts(config, false, len, rng_out);
    }
}

/// Jammer-blocked g2 measurement with the same scattered-channel efficiencies.
inline G2Estimate companion_g2(const ExperimentConfig& config, std::uint64_t pulses, std::uint64_t row_key) {
    ExperimentConfig blocked = config;
    blocked.channel.background_per_bin = 0.0;
    Rng rng = make_stream(config.seed, {row_key, 0xC0FFEEULL});
    return estimate_g2(simulate_counts(blocked, true, pulses, rng));
}

inline SweepRow run_sweep_row(const ExperimentConfig& base, SweepVariable variable, double value,
                              std::uint64_t dwell_pulses, std::uint64_t companion_pulses) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SweepRow row;
    row.value = value;
    row.classical = row.quantum = SnrResult{nan, nan, 0, 0};
    row.qef = QefEstimate{nan, nan};
    row.g2 = G2Estimate{nan, nan, nan, nan, nan};
    auto note = [&row](const std::exception& e) {
        if (!row.error) row.error = e.what();
    };
    try {
        const ExperimentConfig config = validate_config(with_sweep_value(base, variable, value));
        const std::uint64_t key = std::bit_cast<std::uint64_t>(value);
        acquire_toggled(config, dwell_pulses, key, row.in, row.out);
        try {
            row.classical = snr_from_counts(row.in.n_signal_clicks, row.out.n_signal_clicks);
        } catch (const std::exception& e) { note(e); }
        try {
            row.quantum = snr_from_counts(row.in.n_coincidences, row.out.n_coincidences);
        } catch (const std::exception& e) { note(e); }
        try {
            row.qef = qef(row.quantum, row.classical);
        } catch (const std::exception& e) { note(e); }
        try {
            row.g2 = companion_g2(config, companion_pulses, key);
        } catch (const std::exception& e) { note(e); }
    } catch (const std::exception& e) {
        note(e);
    }
    return row;
}

/// Toggled in/out sweep over mu or background. Rows run concurrently, each on substreams
/// keyed by (seed, value), and errors stay local to their row.
inline SweepTable run_sweep(const ExperimentConfig& config, SweepVariable variable, std::span<const double> values,
                            std::uint64_t dwell_pulses, const SweepOptions& options = {}) {
    if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
    validate_config(config);
    if (dwell_pulses < 2 * config.toggle_period_pulses)
        throw ConfigError("dwell_pulses", "dwell must cover at least one in/out toggle pair");
    const std::uint64_t companion = options.companion_pulses ? options.companion_pulses : std::max<std::uint64_t>(1, dwell_pulses / 4);

    std::vector<double> sorted(values.begin(), values.end());
    std::stable_sort(sorted.begin(), sorted.end());

    SweepTable table;
    table.variable = variable;
    table.rows.resize(sorted.size());
    parallel_for(sorted.size(), options.threads, [&](std::size_t i) {
        table.rows[i] = run_sweep_row(config, variable, sorted[i], dwell_pulses, companion);
    });
    return table;
}

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

} // namespace detail

inline constexpr const char* kSweepCsvHeader =
    "value,n_in_singles,n_out_singles,n_in_coinc,n_out_coinc,snr_c,snr_c_err,snr_q,snr_q_err,qef,g2,g2_err";

inline void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    using detail::fmt_double;
    os << kSweepCsvHeader << '\n';
    for (const SweepRow& r : table.rows) {
        os << fmt_double(r.value) << ',' << r.in.n_signal_clicks << ',' << r.out.n_signal_clicks << ','
           << r.in.n_coincidences << ',' << r.out.n_coincidences << ',' << fmt_double(r.classical.value) << ','
           << fmt_double(r.classical.std_err) << ',' << fmt_double(r.quantum.value) << ','
           << fmt_double(r.quantum.std_err) << ',' << fmt_double(r.qef.value) << ',' << fmt_double(r.g2.value)
           << ',' << fmt_double(r.g2.std_err) << '\n';
    }
}

} // namespace qisim
