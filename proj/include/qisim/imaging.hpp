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
#include <qisim/parallel.hpp>
#include <qisim/random.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace qisim {

/// Dense row-major 2-D array.
template <class T>
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<T>& values() const { return data_; }
    std::vector<T>& values() { return data_; }

    bool operator==(const Grid&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Target reflectivity map, one entry per raster position.
struct Scene {
    Grid<double> reflectivity;
    double pixel_pitch = 1.0;
};

inline void validate_scene(const Scene& scene) {
    if (scene.reflectivity.rows() < 1 || scene.reflectivity.cols() < 1) throw DomainError("scene must be at least 1x1");
    for (double v : scene.reflectivity.values())
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("scene reflectivity out of [0, 1]");
}

enum class ImageKind { CI, QI };

struct PixelImage {
    Grid<double> values;
    std::uint64_t dwell_pulses = 0;
    ImageKind kind = ImageKind::CI;
};

struct ImagePair {
    PixelImage ci; ///< signal singles per pixel
    PixelImage qi; ///< signal-herald coincidences per pixel
};

using ForegroundMask = Grid<std::uint8_t>;

/// Foreground = pixels brighter than the midpoint of the scene's range.
inline ForegroundMask foreground_mask(const Scene& scene) {
    const auto& v = scene.reflectivity.values();
    double lo = v.front();
    double hi = v.front();
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double mid = 0.5 * (lo + hi);
    ForegroundMask m(scene.reflectivity.rows(), scene.reflectivity.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = scene.reflectivity(r, c) > mid;
    return m;
}

/// Raster scan: one aggregate-mode acquisition per pixel with the pixel's reflectivity and
/// the configured background. CI and QI come from the same acquisition. Pixel (r, c) uses
/// the substream keyed by (seed, r, c).
inline ImagePair raster_scan(const Scene& scene, const ExperimentConfig& config, std::uint64_t dwell_pulses,
                             std::uint64_t seed, unsigned threads = 1) {
    validate_scene(scene);
    validate_config(config);
    if (dwell_pulses < 1) throw DomainError("dwell must be at least one pulse");
    const std::size_t rows = scene.reflectivity.rows();
    const std::size_t cols = scene.reflectivity.cols();
    ImagePair out{{Grid<double>(rows, cols), dwell_pulses, ImageKind::CI},
                  {Grid<double>(rows, cols), dwell_pulses, ImageKind::QI}};
    parallel_for(rows * cols, threads, [&](std::size_t i) {
        const std::size_t r = i / cols;
        const std::size_t c = i % cols;
        ExperimentConfig pixel = config;
        pixel.channel.target_reflectivity = scene.reflectivity(r, c);
        Rng rng = make_stream(seed, {r, c});
        const ClickCounts counts = simulate_counts(pixel, true, dwell_pulses, rng);
        out.ci.values(r, c) = static_cast<double>(counts.n_signal_clicks);
        out.qi.values(r, c) = static_cast<double>(counts.n_coincidences);
    });
    return out;
}

/// Bilinear 2x upsampling to (2H-1) x (2W-1). Originals stay at even indices; inserted
/// samples average their 2 (edge) or 4 (face) nearest originals.
inline PixelImage interpolate4(const PixelImage& image) {
    const Grid<double>& in = image.values;
    if (in.rows() < 2 || in.cols() < 2) throw DomainError("interpolation needs at least a 2x2 image");
    Grid<double> out(2 * in.rows() - 1, 2 * in.cols() - 1);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            const std::size_t r0 = r / 2;
            const std::size_t c0 = c / 2;
            const std::size_t r1 = r0 + (r % 2);
            const std::size_t c1 = c0 + (c % 2);
            out(r, c) = 0.25 * (in(r0, c0) + in(r0, c1) + in(r1, c0) + in(r1, c1));
        }
    }
    return PixelImage{std::move(out), image.dwell_pulses, image.kind};
}

/// (mean_fg - mean_bg) / sqrt((var_fg + var_bg) / 2), population variances. When both
/// variances vanish: 0 for equal means, otherwise +/-infinity ("infinite contrast").
inline double contrast(const PixelImage& image, const ForegroundMask& mask) {
    const Grid<double>& g = image.values;
    if (mask.rows() != g.rows() || mask.cols() != g.cols()) throw DomainError("mask size does not match image");
    double sum[2] = {0.0, 0.0};
    double n[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int k = mask.values()[i] ? 1 : 0;
        sum[k] += g.values()[i];
        n[k] += 1.0;
    }
    if (n[0] == 0.0 || n[1] == 0.0) throw DomainError("contrast needs both foreground and background pixels");
    const double mean[2] = {sum[0] / n[0], sum[1] / n[1]};
    double ss[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int k = mask.values()[i] ? 1 : 0;
        const double d = g.values()[i] - mean[k];
        ss[k] += d * d;
    }
    const double pooled = 0.5 * (ss[0] / n[0] + ss[1] / n[1]);
    const double diff = mean[1] - mean[0];
    if (pooled == 0.0) {
        if (diff == 0.0) return 0.0;
        return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return diff / std::sqrt(pooled);
}

/// Pearson correlation between two equally sized images.
inline double pixel_correlation(const Grid<double>& a, const Grid<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DomainError("correlation needs equal sizes >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.values()[i];
        mb += b.values()[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.values()[i] - ma;
        const double db = b.values()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw DomainError("correlation undefined for a constant image");
    return sab / std::sqrt(saa * sbb);
}

} // namespace qisim
