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
#include <qisim/channel.hpp>
#include <qisim/tag_io.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace qisim;

namespace {

TimeTagStream sample_stream() {
    ExperimentConfig cfg;
    cfg.source.mu = 0.2;
    cfg.source.eta_herald = 0.5;
    cfg.channel.collection_fraction = 0.5;
    cfg.channel.background_per_bin = 0.01;
    Rng rng = make_stream(51);
    return simulate_tags(cfg, true, 50'000, rng);
}

} // namespace

TEST(Qitt, RoundTrip) {
    const TimeTagStream s = sample_stream();
    ASSERT_FALSE(s.tags.empty());
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_qitt(ss, s);
    EXPECT_EQ(ss.str().size(), 16 + 9 * s.tags.size());
    EXPECT_EQ(read_qitt(ss), s);
}

TEST(Qitt, LittleEndianLayout) {
    const TimeTagStream s{{{Channel::Herald, 0x0102030405060708ULL}}, 0x0102030405060709ULL};
    std::stringstream ss;
    write_qitt(ss, s);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 4), "QITT");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[8], 0x09);
    EXPECT_EQ(bytes[15], 0x01);
    EXPECT_EQ(bytes[16], 1);
    EXPECT_EQ(bytes[17], 0x08);
}

TEST(Qitt, RejectsMalformedInput) {
    const TimeTagStream s{{{Channel::Signal, 5}, {Channel::Herald, 9}}, 100};
    std::stringstream good;
    write_qitt(good, s);
    const std::string bytes = good.str();

    auto reject = [](std::string data) {
        std::istringstream in(data);
        EXPECT_THROW(read_qitt(in), FormatError);
    };
    reject("");
    reject("QITX" + bytes.substr(4));
    reject(bytes.substr(0, 12));
    reject(bytes.substr(0, bytes.size() - 3));
    std::string bad_version = bytes;
    bad_version[4] = 2;
    reject(bad_version);
    std::string bad_channel = bytes;
    bad_channel[16] = 7;
    reject(bad_channel);
    std::string unsorted = bytes;
    std::swap_ranges(unsorted.begin() + 16, unsorted.begin() + 25, unsorted.begin() + 25);
    reject(unsorted);
}

TEST(TagCsv, RoundTrip) {
    const TimeTagStream s = sample_stream();
    std::stringstream ss;
    write_tags_csv(ss, s);
    EXPECT_EQ(read_tags_csv(ss), s);
}

TEST(TagCsv, RejectsMalformedInput) {
    for (const char* bad : {"", "channel,time_ps\n", "# duration_ps=x\nchannel,time_ps\n",
                            "# duration_ps=100\nsignal,5\n", "# duration_ps=100\nchannel,time_ps\nidler,5\n",
                            "# duration_ps=100\nchannel,time_ps\nsignal,-5\n",
                            "# duration_ps=100\nchannel,time_ps\nsignal,5x\n",
                            "# duration_ps=100\nchannel,time_ps\nsignal,500\n",
                            "# duration_ps=100\nchannel,time_ps\nsignal,50\nherald,40\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(read_tags_csv(in), FormatError) << bad;
    }
}
