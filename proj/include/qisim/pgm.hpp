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
#include <qisim/imaging.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

// Plain-text portable graymap (P2) only.

namespace qisim {

struct Graymap {
    Grid<std::uint32_t> pixels;
    std::uint32_t maxval = 255;
};

namespace detail {

/// Next whitespace-delimited token, skipping '#' comments to end of line.
inline bool next_pgm_token(std::istream& is, std::string& token) {
    token.clear();
    char ch = 0;
    while (is.get(ch)) {
        if (ch == '#') {
            std::string rest;
            std::getline(is, rest);
            if (!token.empty()) return true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!token.empty()) return true;
            continue;
        }
        token.push_back(ch);
    }
    return !token.empty();
}

inline std::uint64_t pgm_number(std::istream& is, const char* what) {
    std::string tok;
    if (!next_pgm_token(is, tok)) throw FormatError(std::string("bad scene: missing ") + what);
    if (tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 12)
        throw FormatError(std::string("bad scene: invalid ") + what + " '" + tok + "'");
    return std::stoull(tok);
}

} // namespace detail

inline Graymap read_pgm(std::istream& is) {
    std::string magic;
    if (!detail::next_pgm_token(is, magic) || magic != "P2") throw FormatError("bad scene: expected P2 graymap");
    const std::uint64_t width = detail::pgm_number(is, "width");
    const std::uint64_t height = detail::pgm_number(is, "height");
    const std::uint64_t maxval = detail::pgm_number(is, "maxval");
    if (width == 0 || height == 0 || width * height > (1ULL << 26)) throw FormatError("bad scene: dimensions");
    if (maxval == 0 || maxval > 65535) throw FormatError("bad scene: maxval out of range");
    Graymap g{Grid<std::uint32_t>(height, width), static_cast<std::uint32_t>(maxval)};
    for (std::uint64_t r = 0; r < height; ++r) {
        for (std::uint64_t c = 0; c < width; ++c) {
            const std::uint64_t v = detail::pgm_number(is, "pixel");
            if (v > maxval) throw FormatError("bad scene: pixel exceeds maxval");
            g.pixels(r, c) = static_cast<std::uint32_t>(v);
        }
    }
    std::string extra;
    if (detail::next_pgm_token(is, extra)) throw FormatError("bad scene: trailing data");
    return g;
}

/// Scene with reflectivity = gray / maxval.
inline Scene read_scene(std::istream& is) {
    const Graymap g = read_pgm(is);
    Scene s{Grid<double>(g.pixels.rows(), g.pixels.cols()), 1.0};
    for (std::size_t i = 0; i < g.pixels.size(); ++i)
        s.reflectivity.values()[i] = static_cast<double>(g.pixels.values()[i]) / g.maxval;
    return s;
}

inline void write_pgm(std::ostream& os, const Graymap& g) {
    os << "P2\n" << g.pixels.cols() << ' ' << g.pixels.rows() << '\n' << g.maxval << '\n';
    for (std::size_t r = 0; r < g.pixels.rows(); ++r) {
        std::size_t line = 0;
        for (std::size_t c = 0; c < g.pixels.cols(); ++c) {
            const std::string v = std::to_string(g.pixels(r, c));
            if (line > 0 && line + 1 + v.size() > 70) {
                os << '\n';
                line = 0;
            }
            if (line > 0) {
                os << ' ';
                ++line;
            }
            os << v;
            line += v.size();
        }
        os << '\n';
    }
}

/// Counts linearly rescaled so the image maximum maps to 65535.
inline Graymap to_graymap(const PixelImage& image) {
    const Grid<double>& v = image.values;
    double hi = 0.0;
    for (double x : v.values()) hi = std::max(hi, x);
    Graymap g{Grid<std::uint32_t>(v.rows(), v.cols()), 65535};
    for (std::size_t i = 0; i < v.size(); ++i)
        g.pixels.values()[i] = hi > 0.0 ? static_cast<std::uint32_t>(std::lround(std::max(0.0, v.values()[i]) / hi * 65535.0)) : 0;
    return g;
}

inline void write_image_pgm(std::ostream& os, const PixelImage& image) { write_pgm(os, to_graymap(image)); }

/// Raw per-pixel values, one image row per line.
inline void write_image_csv(std::ostream& os, const PixelImage& image) {
    const Grid<double>& v = image.values;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        for (std::size_t c = 0; c < v.cols(); ++c) {
            if (c) os << ',';
            os << std::setprecision(12) << v(r, c);
        }
        os << '\n';
    }
}

} // namespace qisim
