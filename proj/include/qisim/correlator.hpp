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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <span>
#include <vector>

namespace qisim {

/// Streaming pulse-locked binner. Feed tags in time order, then call finish().
/// A bin with >= 1 tag on a channel counts one click on that channel; tags outside every
/// bin (or outside pulses 1..n_pulses) are discarded.
class CoincidenceBinner {
  public:
    CoincidenceBinner(PulseGrid grid, std::uint64_t n_pulses) : grid_(grid), n_pulses_(n_pulses) {
        if (grid.bin_width_ps <= 0 || grid.bin_width_ps > grid.period_ps)
            throw DomainError("bin width must be in (0, pulse period]");
    }

    void push(const TimeTag& tag) {
        if (started_ && tag < last_) throw DomainError("time-tag stream is not sorted");
        last_ = tag;
        started_ = true;
        const auto bin = grid_.bin_of(tag.time_ps);
        if (!bin || *bin == 0 || *bin > n_pulses_) return;
        if (*bin != current_) {
            flush();
            current_ = *bin;
        }
        (tag.channel == Channel::Signal ? signal_ : herald_) = true;
    }

    ClickCounts finish() {
        flush();
        counts_.n_pulses = n_pulses_;
        return counts_;
    }

  private:
    void flush() {
        counts_.n_signal_clicks += signal_;
        counts_.n_herald_clicks += herald_;
        counts_.n_coincidences += (signal_ && herald_);
        signal_ = herald_ = false;
    }

    PulseGrid grid_;
    std::uint64_t n_pulses_;
    ClickCounts counts_{};
    std::uint64_t current_ = 0;
    bool signal_ = false;
    bool herald_ = false;
    bool started_ = false;
    TimeTag last_{};
};

/// Single pass over a sorted stream; O(number of tags).
inline ClickCounts bin_and_count(const TimeTagStream& stream, Picoseconds bin_width_ps, Picoseconds pulse_period_ps) {
    const PulseGrid grid{pulse_period_ps, bin_width_ps};
    CoincidenceBinner binner(grid, grid.pulses_in(stream.duration_ps));
    for (const TimeTag& tag : stream.tags) binner.push(tag);
    return binner.finish();
}

/// Parallel variant: the stream is cut at bin boundaries so no bin straddles two chunks,
/// and the per-chunk counts are summed.
inline ClickCounts bin_and_count(const TimeTagStream& stream, Picoseconds bin_width_ps, Picoseconds pulse_period_ps,
                                 unsigned threads) {
    const std::size_t n = stream.tags.size();
    if (threads <= 1 || n < 2 * threads) return bin_and_count(stream, bin_width_ps, pulse_period_ps);
    const PulseGrid grid{pulse_period_ps, bin_width_ps};
    const std::uint64_t n_pulses = grid.pulses_in(stream.duration_ps);
    const auto slot = [&](std::size_t i) {
        return (stream.tags[i].time_ps + static_cast<std::uint64_t>(grid.lower_offset())) /
               static_cast<std::uint64_t>(grid.period_ps);
    };

    std::vector<std::size_t> cuts{0};
    for (unsigned c = 1; c < threads; ++c) {
        std::size_t i = std::max(cuts.back(), n * c / threads);
        while (i > 0 && i < n && slot(i) == slot(i - 1)) ++i;
        if (i > cuts.back() && i < n) cuts.push_back(i);
    }
    cuts.push_back(n);
    for (std::size_t j = 1; j + 1 < cuts.size(); ++j)
        if (stream.tags[cuts[j]] < stream.tags[cuts[j] - 1]) throw DomainError("time-tag stream is not sorted");

    std::vector<std::future<ClickCounts>> parts;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        parts.push_back(std::async(std::launch::async, [&, lo = cuts[j], hi = cuts[j + 1]] {
            CoincidenceBinner binner(grid, n_pulses);
            for (std::size_t i = lo; i < hi; ++i) binner.push(stream.tags[i]);
            ClickCounts c = binner.finish();
            c.n_pulses = 0;
            return c;
        }));
    }
    ClickCounts total;
    for (auto& p : parts) total += p.get();
    total.n_pulses = n_pulses;
    return total;
}

/// Signal-herald pairs with |dt| <= half_window, each tag used at most once. Greedy
/// earliest-unmatched-first two-pointer merge: deterministic, not guaranteed maximum.
inline std::uint64_t windowed_coincidences(const TimeTagStream& stream, Picoseconds half_window_ps) {
    if (!std::is_sorted(stream.tags.begin(), stream.tags.end())) throw DomainError("time-tag stream is not sorted");
    std::vector<std::int64_t> signal;
    std::vector<std::int64_t> herald;
    for (const TimeTag& t : stream.tags)
        (t.channel == Channel::Signal ? signal : herald).push_back(static_cast<std::int64_t>(t.time_ps));

    std::uint64_t matches = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < signal.size() && j < herald.size()) {
        if (herald[j] < signal[i] - half_window_ps) {
            ++j;
        } else if (signal[i] < herald[j] - half_window_ps) {
            ++i;
        } else {
            ++matches;
            ++i;
            ++j;
        }
    }
    return matches;
}

/// Two-mode second-order coherence estimate.
struct G2Estimate {
    double value = 0.0;
    double std_err = 0.0;
    double p_s = 0.0;
    double p_h = 0.0;
    double p_sh = 0.0;
};

/// g2 = P_sh / (P_s P_h) from counts, with relative error sqrt(1/C + 1/N_s + 1/N_h).
/// A zero coincidence count gets the one-count error n / (N_s N_h).
inline G2Estimate estimate_g2(const ClickCounts& counts) {
    if (counts.n_pulses == 0 || counts.n_signal_clicks == 0 || counts.n_herald_clicks == 0)
        throw DomainError("g2 undefined");
    const double n = static_cast<double>(counts.n_pulses);
    const double ns = static_cast<double>(counts.n_signal_clicks);
    const double nh = static_cast<double>(counts.n_herald_clicks);
    const double c = static_cast<double>(counts.n_coincidences);
    G2Estimate g;
    g.p_s = ns / n;
    g.p_h = nh / n;
    g.p_sh = c / n;
    g.value = c * n / (ns * nh);
    g.std_err = c > 0.0 ? g.value * std::sqrt(1.0 / c + 1.0 / ns + 1.0 / nh) : n / (ns * nh);
    return g;
}

} // namespace qisim
