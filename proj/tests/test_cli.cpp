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
// End-to-end checks of the qisim executable.

#include <qisim/config_io.hpp>
#include <qisim/pgm.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qisim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    /// Runs qisim with `args` in the scratch directory; returns the exit code.
    int run(const std::string& args, const std::string& env = "") {
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + QISIM_CLI_PATH + "' " + args +
                                " > stdout.txt 2> stderr.txt";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    std::vector<std::vector<std::string>> read_csv(const std::string& name) const {
        std::vector<std::vector<std::string>> rows;
        std::istringstream in(read(name));
        std::string line;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            rows.push_back(cells);
        }
        return rows;
    }

    void write_two_level_scene(const std::string& name) const {
        std::ostringstream os;
        os << "P2\n16 16\n255\n";
        for (int r = 0; r < 16; ++r) {
            for (int c = 0; c < 16; ++c) os << ((r >= 4 && r < 12 && c >= 3 && c < 13) ? 230 : 13) << ' ';
            os << '\n';
        }
        write(name, os.str());
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, CharacterizeG2DecreasesWithMu) {
    ASSERT_EQ(run("--preset paper-default characterize --mu 0.001,0.005,0.01,0.015,0.02,0.025 --dwell-s 1 "
                  "--out char.csv"),
              0)
        << read("stderr.txt");
    const auto rows = read_csv("char.csv");
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0][0], "mu");
    EXPECT_EQ(rows[0][5], "g2");
    double prev = 1e300;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double g2 = std::stod(rows[i][5]);
        EXPECT_LT(g2, prev) << rows[i][0];
        prev = g2;
    }
}

TEST_F(CliTest, CharacterizeIsByteReproducible) {
    ASSERT_EQ(run("--seed 9 characterize --mu 0.002,0.01 --pulses 1000000 --out a.csv"), 0);
    ASSERT_EQ(run("--seed 9 --threads 3 characterize --mu 0.002,0.01 --pulses 1000000 --out b.csv"), 0);
    EXPECT_EQ(read("a.csv"), read("b.csv"));
    EXPECT_FALSE(read("a.csv").empty());
}

TEST_F(CliTest, EmptyMuListIsUsageError) {
    EXPECT_EQ(run("characterize --mu '' --out x.csv"), 2);
    EXPECT_EQ(run("characterize --mu , --out x.csv"), 2);
    EXPECT_EQ(run("characterize --out x.csv"), 2);
    EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(CliTest, InvalidConfigNamesField) {
    write("bad.json", R"({"source": {"mu": -0.001}})");
    EXPECT_EQ(run("--config bad.json characterize --mu 0.01"), 3);
    EXPECT_NE(read("stderr.txt").find("mu"), std::string::npos);

    write("bin.json", R"({"channel": {"bin_width_ps": 20000}})");
    EXPECT_EQ(run("--config bin.json sweep --values 0.01"), 3);
    EXPECT_NE(read("stderr.txt").find("bin_width_ps"), std::string::npos);

    EXPECT_EQ(run("--config missing.json characterize --mu 0.01"), 4);
}

TEST_F(CliTest, ConfigFromEnvironment) {
    write("env.json", R"({"source": {"mu": -1}})");
    EXPECT_EQ(run("characterize --mu 0.01 --pulses 1000", "QISIM_CONFIG=env.json"), 3);
    EXPECT_EQ(run("characterize --mu 0.01 --pulses 1000"), 0);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
    EXPECT_EQ(run("characterize --mu 0.01 --pulses 1000 --out no/such/dir/x.csv"), 4);
}

TEST_F(CliTest, SweepWritesTableAndLedger) {
    ASSERT_EQ(run("--preset rmax-jammed --ledger runs.jsonl sweep --variable background --values 1e-5,1e-4 "
                  "--pulses 400000000 --out sweep.csv"),
              0)
        << read("stderr.txt");
    const auto rows = read_csv("sweep.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].size(), 12u);
    EXPECT_EQ(rows[0][9], "qef");

    ASSERT_EQ(run("--preset rmax-jammed --ledger runs.jsonl sweep --variable background --values 1e-5,1e-4 "
                  "--pulses 400000000 --out sweep2.csv"),
              0);
    EXPECT_EQ(read("sweep.csv"), read("sweep2.csv"));

    // Append-only: two records, first unchanged by the second run.
    std::istringstream ledger(read("runs.jsonl"));
    std::string first;
    std::string second;
    std::getline(ledger, first);
    std::getline(ledger, second);
    const auto a = qisim::Json::parse(first);
    const auto b = qisim::Json::parse(second);
    EXPECT_EQ(a["command"], "sweep");
    EXPECT_EQ(a["config_digest"], b["config_digest"]);
    EXPECT_EQ(a["outputs"][0], "sweep.csv");
    EXPECT_EQ(b["outputs"][0], "sweep2.csv");
}

TEST_F(CliTest, DigestStableUnderKeyReordering) {
    write("a.json", R"({"seed": 5, "source": {"mu": 0.004, "eta_herald": 0.1}})");
    write("b.json", R"({"source": {"eta_herald": 0.1, "mu": 0.004}, "seed": 5})");
    ASSERT_EQ(run("--config a.json --ledger l.jsonl characterize --mu 0.01 --pulses 1000"), 0);
    ASSERT_EQ(run("--config b.json --ledger l.jsonl characterize --mu 0.01 --pulses 1000"), 0);
    std::istringstream ledger(read("l.jsonl"));
    std::string first;
    std::string second;
    std::getline(ledger, first);
    std::getline(ledger, second);
    EXPECT_EQ(qisim::Json::parse(first)["config_digest"], qisim::Json::parse(second)["config_digest"]);
}

TEST_F(CliTest, SweepRowFailuresStayInTable) {
    ASSERT_EQ(run("--preset qef-bench sweep --values=-1,0.01 --pulses 200000000"), 0) << read("stderr.txt");
    EXPECT_EQ(run("sweep --values=-1,-2 --pulses 200000000"), 3);
}

TEST_F(CliTest, ImageQiSharperUnderJamming) {
    write_two_level_scene("scene.pgm");
    ASSERT_EQ(run("--preset imaging-jammed image --scene scene.pgm --dwell-s 1 --out img"), 0) << read("stderr.txt");
    const auto summary = qisim::Json::parse(read("stdout.txt"));
    EXPECT_GT(summary["contrast_qi"].get<double>(), summary["contrast_ci"].get<double>()) << summary.dump();
    for (const char* f : {"img_ci.pgm", "img_qi.pgm", "img_ci.csv", "img_qi.csv", "img_qi_interp.pgm"})
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    std::istringstream pgm(read("img_qi_interp.pgm"));
    const qisim::Graymap g = qisim::read_pgm(pgm);
    EXPECT_EQ(g.pixels.rows(), 31u);
    EXPECT_EQ(g.maxval, 65535u);
}

TEST_F(CliTest, BadOrMissingScene) {
    write("bad.pgm", "P2\n2 2\n255\n1 2 3\n");
    EXPECT_EQ(run("image --scene bad.pgm --pulses 10"), 4);
    EXPECT_NE(read("stderr.txt").find("bad scene"), std::string::npos);
    EXPECT_EQ(run("image --scene nowhere.pgm --pulses 10"), 4);
}

TEST_F(CliTest, TagsRoundTripThroughCorrelate) {
    ASSERT_EQ(run("--preset bare-source --seed 3 simulate-tags --pulses 200000 --out t.qitt"), 0);
    ASSERT_EQ(run("--preset bare-source --seed 3 simulate-tags --pulses 200000 --out t.csv"), 0);
    ASSERT_EQ(run("correlate --in t.qitt --half-window-ps 1000"), 0) << read("stderr.txt");
    const auto a = qisim::Json::parse(read("stdout.txt"));
    ASSERT_EQ(run("correlate --in t.csv"), 0);
    const auto b = qisim::Json::parse(read("stdout.txt"));
    EXPECT_EQ(a["coincidences"], b["coincidences"]);
    EXPECT_EQ(a["n_pulses"], 200000);
    EXPECT_GT(a["g2"].get<double>(), 10.0);
}

TEST_F(CliTest, PresetListAndDump) {
    ASSERT_EQ(run("preset"), 0);
    EXPECT_NE(read("stdout.txt").find("qef-bench"), std::string::npos);
    ASSERT_EQ(run("preset rmax-jammed --out r.json"), 0);
    EXPECT_EQ(qisim::load_config((dir_ / "r.json").string()), qisim::preset_rmax_jammed());
    EXPECT_EQ(run("preset nope"), 2);
}
