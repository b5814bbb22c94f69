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

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

// QITT binary layout, all little-endian:
//   header  : "QITT" | u32 version (=1) | u64 duration_ps      (16 bytes)
//   record  : u8 channel (0 = signal, 1 = herald) | u64 time_ps (9 bytes, packed)
// CSV layout:
//   # duration_ps=<u64>
//   channel,time_ps
//   signal,<u64>
//   herald,<u64>

namespace qisim {

inline constexpr std::array<char, 4> kQittMagic{'Q', 'I', 'T', 'T'};
inline constexpr std::uint32_t kQittVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    os.write(buf.data(), buf.size());
}

template <class T>
bool get_le(std::istream& is, T& v) {
    std::array<unsigned char, sizeof(T)> buf{};
    if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size())) return false;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) acc |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    v = static_cast<T>(acc);
    return true;
}

inline void check_stream(const TimeTagStream& s) {
    if (!is_well_formed(s)) throw FormatError("tag stream is unsorted or exceeds its duration");
}

} // namespace detail

inline void write_qitt(std::ostream& os, const TimeTagStream& stream) {
    os.write(kQittMagic.data(), kQittMagic.size());
    detail::put_le<std::uint32_t>(os, kQittVersion);
    detail::put_le<std::uint64_t>(os, stream.duration_ps);
    for (const TimeTag& t : stream.tags) {
        detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.channel));
        detail::put_le<std::uint64_t>(os, t.time_ps);
    }
    if (!os) throw FormatError("failed writing QITT stream");
}

inline TimeTagStream read_qitt(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kQittMagic) throw FormatError("not a QITT stream");
    std::uint32_t version = 0;
    TimeTagStream s;
    if (!detail::get_le(is, version) || !detail::get_le(is, s.duration_ps)) throw FormatError("truncated QITT header");
    if (version != kQittVersion) throw FormatError("unsupported QITT version " + std::to_string(version));
    while (true) {
        std::uint8_t ch = 0;
        if (!detail::get_le(is, ch)) break;
        std::uint64_t t = 0;
        if (!detail::get_le(is, t)) throw FormatError("truncated QITT record");
        if (ch > 1) throw FormatError("bad QITT channel " + std::to_string(ch));
        s.tags.push_back({static_cast<Channel>(ch), t});
    }
    detail::check_stream(s);
    return s;
}

inline void write_tags_csv(std::ostream& os, const TimeTagStream& stream) {
    os << "# duration_ps=" << stream.duration_ps << "\nchannel,time_ps\n";
    for (const TimeTag& t : stream.tags)
        os << (t.channel == Channel::Signal ? "signal" : "herald") << ',' << t.time_ps << '\n';
}

inline TimeTagStream read_tags_csv(std::istream& is) {
    TimeTagStream s;
    std::string line;
    const std::string prefix = "# duration_ps=";
    if (!std::getline(is, line) || line.rfind(prefix, 0) != 0) throw FormatError("missing duration line in tag CSV");
    try {
        s.duration_ps = std::stoull(line.substr(prefix.size()));
    } catch (const std::exception&) {
        throw FormatError("bad duration in tag CSV");
    }
    if (!std::getline(is, line) || line != "channel,time_ps") throw FormatError("missing header in tag CSV");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("bad tag CSV row: " + line);
        const std::string name = line.substr(0, comma);
        Channel ch;
        if (name == "signal") ch = Channel::Signal;
        else if (name == "herald") ch = Channel::Herald;
        else throw FormatError("bad channel in tag CSV: " + name);
        try {
            std::size_t used = 0;
            const std::string num = line.substr(comma + 1);
            const std::uint64_t t = std::stoull(num, &used);
            if (used != num.size() || num.front() == '-') throw FormatError("bad time");
            s.tags.push_back({ch, t});
        } catch (const std::exception&) {
            throw FormatError("bad time in tag CSV: " + line);
        }
    }
    detail::check_stream(s);
    return s;
}

} // namespace qisim
