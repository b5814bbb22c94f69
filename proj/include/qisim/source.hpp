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
#include <qisim/random.hpp>

#include <cmath>
#include <cstdint>
#include <random>

namespace qisim {

/// Idler wavelength from energy conservation of two pump photons: 2/pump = 1/signal + 1/idler.
inline double idler_wavelength(double pump_nm, double signal_nm) {
    const double inv = 2.0 / pump_nm - 1.0 / signal_nm;
    if (!(inv > 0.0) || !std::isfinite(inv)) throw DomainError("no energy-conserving idler");
    return 1.0 / inv;
}

/// Mean pairs per pulse from the detected signal rate: N_s / (R_p * eta_ds).
inline double mean_photon_number(double signal_counts_per_s, double rep_rate_hz, double eta_signal_detector) {
    if (!(rep_rate_hz > 0.0) || !(eta_signal_detector > 0.0) || eta_signal_detector > 1.0)
        throw DomainError("mean photon number undefined: zero denominator");
    return signal_counts_per_s / (rep_rate_hz * eta_signal_detector);
}

// Pair-number statistics per pulse. Each strategy provides the log of the probability
// generating function, ln E[z^n], which fixes the closed-form click probabilities, its
// two-arm correlation term
//   ln E[((1-eh)(1-es))^n] - ln E[(1-eh)^n] - ln E[(1-es)^n],
// written out so it is exactly zero when either efficiency is zero, and a sampler used by the
// time-tag simulation.

/// Multi-mode SFWM limit: Poisson(mu).
struct PoissonPairs {
    static double log_pgf(double mu, double z) { return -mu * (1.0 - z); }
    static double log_pgf_correlation(double mu, double eta_h, double eta_s) { return mu * eta_h * eta_s; }

    class Sampler {
      public:
        explicit Sampler(double mu) : active_(mu > 0.0), dist_(active_ ? mu : 1.0) {}
        std::uint64_t operator()(Rng& rng) { return active_ ? dist_(rng) : 0; }

      private:
        bool active_;
        std::poisson_distribution<std::uint64_t> dist_;
    };
};

/// Single-mode thermal (geometric) statistics, mean mu.
struct ThermalPairs {
    static double log_pgf(double mu, double z) { return -std::log1p(mu * (1.0 - z)); }
    static double log_pgf_correlation(double mu, double eta_h, double eta_s) {
        if (eta_h == 0.0 || eta_s == 0.0) return 0.0;
        return std::log1p(mu * eta_h) + std::log1p(mu * eta_s) - std::log1p(mu * (eta_h + eta_s - eta_h * eta_s));
    }

    class Sampler {
      public:
        explicit Sampler(double mu) : active_(mu > 0.0), dist_(1.0 / (1.0 + (active_ ? mu : 1.0))) {}
        std::uint64_t operator()(Rng& rng) { return active_ ? dist_(rng) : 0; }

      private:
        bool active_;
        std::geometric_distribution<std::uint64_t> dist_;
    };
};

/// One draw of the number of pairs created by a pulse.
template <class PairStats = PoissonPairs>
std::uint64_t sample_pair_count(double mu, Rng& rng) {
    typename PairStats::Sampler sampler(mu);
    return sampler(rng);
}

} // namespace qisim
