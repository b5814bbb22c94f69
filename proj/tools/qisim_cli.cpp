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
// qisim: command-line front end for the quantum-illumination simulator.
//
//   qisim [--config FILE | --preset NAME] [--seed N] [--threads N] [--ledger FILE] <command> ...
//
// Commands: preset, characterize, sweep, image, simulate-tags, correlate. Exit codes:
// 0 success, 2 usage, 3 config, 4 I/O.

#include <qisim/qisim.hpp>

#include <CLI11.hpp>

#include <bit>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace qisim;

enum ExitCode { kOk = 0, kUsage = 2, kConfig = 3, kIo = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string ledger_path = "qisim-ledger.jsonl";
};

ExperimentConfig resolve_config(const Globals& g) {
    if (!g.config_path.empty() && !g.preset_name.empty()) throw UsageError("--config and --preset are exclusive");
    ExperimentConfig c;
    if (!g.preset_name.empty()) {
        const auto p = preset(g.preset_name);
        if (!p) throw UsageError("unknown preset '" + g.preset_name + "'");
        c = *p;
    } else {
        std::string path = g.config_path;
        if (path.empty())
            if (const char* env = std::getenv("QISIM_CONFIG")) path = env;
        if (!path.empty()) {
            try {
                c = load_config(path);
            } catch (const FormatError& e) {
                throw IoError(e.what());
            }
        }
    }
    if (g.seed) c.seed = *g.seed;
    return validate_config(c);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        }
        if (used != item.size()) throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(what) + " list is empty");
    return out;
}

std::uint64_t dwell_pulses(const ExperimentConfig& c, double dwell_s, std::uint64_t pulses) {
    if (dwell_s > 0.0) return static_cast<std::uint64_t>(std::llround(dwell_s * c.source.rep_rate_hz));
    return pulses ? pulses : c.n_pulses;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::out | std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot write " + path);
    return os;
}

void close_out(std::ofstream& os, const std::string& path) {
    os.close();
    if (!os) throw IoError("failed writing " + path);
}

/// FNV-1a over the canonical (sorted-key) JSON of the config.
std::string config_digest(const ExperimentConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void append_run_record(const Globals& g, const ExperimentConfig& c, const std::string& command,
                       const std::vector<std::string>& outputs, const Json& summary) {
    if (g.ledger_path.empty()) return;
    Json rec;
    rec["timestamp"] = utc_timestamp();
    rec["config_digest"] = config_digest(c);
    rec["seed"] = c.seed;
    rec["command"] = command;
    rec["outputs"] = outputs;
    rec["summary"] = summary;
    std::ofstream os(g.ledger_path, std::ios::app);
    if (!os) throw IoError("cannot append to ledger " + g.ledger_path);
    os << rec.dump() << '\n';
}

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

// Commands ---------------------------------------------------------------------------------

struct PresetArgs {
    std::string name;
    std::string out;
};

int cmd_preset(const PresetArgs& a) {
    if (a.name.empty()) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return kOk;
    }
    const auto c = preset(a.name);
    if (!c) throw UsageError("unknown preset '" + a.name + "'");
    if (a.out.empty()) {
        std::cout << serialize_config(*c);
    } else {
        auto os = open_out(a.out);
        os << serialize_config(*c);
        close_out(os, a.out);
    }
    return kOk;
}

struct CharacterizeArgs {
    std::string mu;
    double dwell_s = 0.0;
    std::uint64_t pulses = 0;
    std::string out;
};

int cmd_characterize(const Globals& g, const CharacterizeArgs& a) {
    const std::vector<double> mus = parse_list(a.mu, "mu");
    const ExperimentConfig base = characterization_config(resolve_config(g));
    const std::uint64_t n = dwell_pulses(base, a.dwell_s, a.pulses);
    std::vector<std::string> lines(mus.size());
    parallel_for(mus.size(), g.threads, [&](std::size_t i) {
        ExperimentConfig c = base;
        c.source.mu = mus[i];
        validate_config(c);
        Rng rng = make_stream(c.seed, {std::bit_cast<std::uint64_t>(mus[i])});
        const ClickCounts k = simulate_counts(c, true, n, rng);
        double g2 = std::numeric_limits<double>::quiet_NaN();
        double g2_err = g2;
        double g2_analytic = g2;
        try {
            const G2Estimate e = estimate_g2(k);
            g2 = e.value;
            g2_err = e.std_err;
        } catch (const DomainError&) {
        }
        try {
            g2_analytic = analytic_g2(click_probabilities(c.source, c.channel, true));
        } catch (const DomainError&) {
        }
        std::ostringstream row;
        row << detail::fmt_double(mus[i]) << ',' << n << ',' << k.n_signal_clicks << ',' << k.n_herald_clicks << ','
            << k.n_coincidences << ',' << detail::fmt_double(g2) << ',' << detail::fmt_double(g2_err) << ','
            << detail::fmt_double(g2_analytic);
        lines[i] = row.str();
    });

    std::ostringstream csv;
    csv << "mu,n_pulses,signal_singles,herald_singles,coincidences,g2,g2_err,g2_analytic\n";
    for (const auto& l : lines) csv << l << '\n';
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        auto os = open_out(a.out);
        os << csv.str();
        close_out(os, a.out);
    }
    Json summary{{"rows", mus.size()}, {"pulses_per_row", n}};
    append_run_record(g, base, "characterize", a.out.empty() ? std::vector<std::string>{} : std::vector{a.out},
                      summary);
    return kOk;
}

struct SweepArgs {
    std::string variable = "mu";
    std::string values;
    double dwell_s = 0.0;
    std::uint64_t pulses = 0;
    std::uint64_t companion_pulses = 0;
    std::string out;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
    const auto variable = parse_sweep_variable(a.variable);
    if (!variable) throw UsageError("variable must be 'mu' or 'background'");
    const std::vector<double> values = parse_list(a.values, "values");
    const ExperimentConfig config = resolve_config(g);
    // Without an explicit dwell, cover at least one in/out toggle pair.
    const std::uint64_t dwell = (a.dwell_s > 0.0 || a.pulses)
                                    ? dwell_pulses(config, a.dwell_s, a.pulses)
                                    : std::max(config.n_pulses, 2 * config.toggle_period_pulses);
    const SweepTable table = run_sweep(config, *variable, values, dwell, {a.companion_pulses, g.threads});

    std::ostringstream csv;
    write_sweep_csv(csv, table);
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        auto os = open_out(a.out);
        os << csv.str();
        close_out(os, a.out);
    }

    std::size_t ok = 0;
    Json errors = Json::array();
    for (const SweepRow& r : table.rows) {
        if (r.error) errors.push_back({{"value", r.value}, {"error", *r.error}});
        else ++ok;
    }
    for (const auto& e : errors) std::cerr << "row " << e["value"] << ": " << e["error"].get<std::string>() << '\n';
    Json summary{{"variable", to_string(*variable)}, {"rows", table.rows.size()}, {"rows_ok", ok},
                 {"dwell_pulses", dwell}, {"errors", errors}};
    append_run_record(g, config, "sweep", a.out.empty() ? std::vector<std::string>{} : std::vector{a.out}, summary);
    return ok > 0 ? kOk : kConfig;
}

struct ImageArgs {
    std::string scene;
    double dwell_s = 0.0;
    std::uint64_t pulses = 0;
    std::string out_prefix = "image";
};

int cmd_image(const Globals& g, const ImageArgs& a) {
    const ExperimentConfig config = resolve_config(g);
    std::ifstream in(a.scene);
    if (!in) throw IoError("cannot read scene " + a.scene);
    const Scene scene = read_scene(in);
    const std::uint64_t dwell = dwell_pulses(config, a.dwell_s, a.pulses);
    const ImagePair images = raster_scan(scene, config, dwell, config.seed, g.threads);

    std::vector<std::string> outputs;
    auto emit = [&](const std::string& path, auto&& write) {
        auto os = open_out(path);
        write(os);
        close_out(os, path);
        outputs.push_back(path);
    };
    for (const PixelImage* im : {&images.ci, &images.qi}) {
        const std::string tag = im->kind == ImageKind::CI ? "ci" : "qi";
        emit(a.out_prefix + "_" + tag + ".pgm", [&](std::ostream& os) { write_image_pgm(os, *im); });
        emit(a.out_prefix + "_" + tag + ".csv", [&](std::ostream& os) { write_image_csv(os, *im); });
        if (im->values.rows() >= 2 && im->values.cols() >= 2)
            emit(a.out_prefix + "_" + tag + "_interp.pgm",
                 [&](std::ostream& os) { write_image_pgm(os, interpolate4(*im)); });
    }

    Json summary{{"dwell_pulses", dwell}, {"rows", scene.reflectivity.rows()}, {"cols", scene.reflectivity.cols()}};
    try {
        const ForegroundMask mask = foreground_mask(scene);
        summary["contrast_ci"] = json_number(contrast(images.ci, mask));
        summary["contrast_qi"] = json_number(contrast(images.qi, mask));
    } catch (const DomainError& e) {
        summary["contrast_error"] = e.what();
    }
    std::cout << summary.dump() << '\n';
    append_run_record(g, config, "image", outputs, summary);
    return kOk;
}

struct TagArgs {
    std::uint64_t pulses = 0;
    double dwell_s = 0.0;
    bool target_out = false;
    std::string format;
    std::string out;
};

bool wants_csv(const std::string& format, const std::string& path) {
    if (!format.empty()) return format == "csv";
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

int cmd_simulate_tags(const Globals& g, const TagArgs& a) {
    if (!a.format.empty() && a.format != "csv" && a.format != "qitt") throw UsageError("format must be qitt or csv");
    const ExperimentConfig config = resolve_config(g);
    const std::uint64_t n = dwell_pulses(config, a.dwell_s, a.pulses);
    Rng rng = make_stream(config.seed, {a.target_out ? 0ULL : 1ULL});
    const TimeTagStream stream = simulate_tags(config, !a.target_out, n, rng);
    const bool csv = wants_csv(a.format, a.out);
    auto os = open_out(a.out, !csv);
    if (csv) write_tags_csv(os, stream);
    else write_qitt(os, stream);
    close_out(os, a.out);
    Json summary{{"pulses", n}, {"tags", stream.tags.size()}, {"target_in", !a.target_out}};
    std::cout << summary.dump() << '\n';
    append_run_record(g, config, "simulate-tags", {a.out}, summary);
    return kOk;
}

struct CorrelateArgs {
    std::string in;
    std::string format;
    Picoseconds bin_width_ps = 0;
    Picoseconds half_window_ps = -1;
};

int cmd_correlate(const Globals& g, const CorrelateArgs& a) {
    const ExperimentConfig config = resolve_config(g);
    std::ifstream is(a.in, std::ios::binary);
    if (!is) throw IoError("cannot read " + a.in);
    const TimeTagStream stream = wants_csv(a.format, a.in) ? read_tags_csv(is) : read_qitt(is);
    const Picoseconds width = a.bin_width_ps > 0 ? a.bin_width_ps : config.channel.bin_width_ps;
    const ClickCounts c = bin_and_count(stream, width, pulse_period_ps(config.source.rep_rate_hz), g.threads);
    Json summary{{"tags", stream.tags.size()},
                 {"n_pulses", c.n_pulses},
                 {"signal_clicks", c.n_signal_clicks},
                 {"herald_clicks", c.n_herald_clicks},
                 {"coincidences", c.n_coincidences}};
    try {
        const G2Estimate e = estimate_g2(c);
        summary["g2"] = e.value;
        summary["g2_err"] = e.std_err;
    } catch (const DomainError& e) {
        summary["g2_error"] = e.what();
    }
    if (a.half_window_ps >= 0) summary["windowed_coincidences"] = windowed_coincidences(stream, a.half_window_ps);
    std::cout << summary.dump() << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator for quantum-illumination standoff detection"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config_path, "JSON config file (default: $QISIM_CONFIG, else paper-default)");
    app.add_option("--preset", g.preset_name, "start from a named preset instead of a config file");
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    app.add_option("--threads", g.threads, "worker cap")->check(CLI::PositiveNumber);
    app.add_option("--ledger", g.ledger_path, "JSON-lines run ledger (empty string disables)");

    PresetArgs preset_args;
    auto* preset_cmd = app.add_subcommand("preset", "print or save a named preset config");
    preset_cmd->add_option("name", preset_args.name, "preset name (omit to list)");
    preset_cmd->add_option("--out", preset_args.out, "output file");

    CharacterizeArgs char_args;
    auto* char_cmd = app.add_subcommand("characterize", "singles, coincidences and g2 vs mu, no background");
    char_cmd->add_option("--mu", char_args.mu, "comma-separated mu values")->required();
    char_cmd->add_option("--dwell-s", char_args.dwell_s, "seconds per mu value")->check(CLI::PositiveNumber);
    char_cmd->add_option("--pulses", char_args.pulses, "pulses per mu value (default: config n_pulses)");
    char_cmd->add_option("--out", char_args.out, "CSV output (default: stdout)");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "toggled target-in/out SNR and QEF sweep");
    sweep_cmd->add_option("--variable", sweep_args.variable, "mu or background (per-bin)");
    sweep_cmd->add_option("--values", sweep_args.values, "comma-separated values")->required();
    sweep_cmd->add_option("--dwell-s", sweep_args.dwell_s, "total seconds per value")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--pulses", sweep_args.pulses, "total pulses per value (default: config n_pulses)");
    sweep_cmd->add_option("--companion-pulses", sweep_args.companion_pulses,
                          "pulses for the jammer-blocked g2 (default: dwell/4)");
    sweep_cmd->add_option("--out", sweep_args.out, "CSV output (default: stdout)");

    ImageArgs image_args;
    auto* image_cmd = app.add_subcommand("image", "raster-scan a PGM scene into CI and QI images");
    image_cmd->add_option("--scene", image_args.scene, "P2 graymap, reflectivity = gray/maxval")->required();
    image_cmd->add_option("--dwell-s", image_args.dwell_s, "seconds per pixel")->check(CLI::PositiveNumber);
    image_cmd->add_option("--pulses", image_args.pulses, "pulses per pixel (default: config n_pulses)");
    image_cmd->add_option("--out", image_args.out_prefix, "output prefix");

    TagArgs tag_args;
    auto* tag_cmd = app.add_subcommand("simulate-tags", "write a time-tag stream");
    tag_cmd->add_option("--pulses", tag_args.pulses, "pulses (default: config n_pulses)");
    tag_cmd->add_option("--dwell-s", tag_args.dwell_s, "seconds")->check(CLI::PositiveNumber);
    tag_cmd->add_flag("--target-out", tag_args.target_out, "remove the target");
    tag_cmd->add_option("--format", tag_args.format, "qitt or csv (default: from extension)");
    tag_cmd->add_option("--out", tag_args.out, "output file")->required();

    CorrelateArgs corr_args;
    auto* corr_cmd = app.add_subcommand("correlate", "bin a time-tag stream and estimate g2");
    corr_cmd->add_option("--in", corr_args.in, "QITT or CSV tag file")->required();
    corr_cmd->add_option("--format", corr_args.format, "qitt or csv (default: from extension)");
    corr_cmd->add_option("--bin-width-ps", corr_args.bin_width_ps, "coincidence bin (default: config)");
    corr_cmd->add_option("--half-window-ps", corr_args.half_window_ps, "also report windowed coincidences");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    if (*seed_opt) g.seed = seed;

    try {
        if (*preset_cmd) return cmd_preset(preset_args);
        if (*char_cmd) return cmd_characterize(g, char_args);
        if (*sweep_cmd) return cmd_sweep(g, sweep_args);
        if (*image_cmd) return cmd_image(g, image_args);
        if (*tag_cmd) return cmd_simulate_tags(g, tag_args);
        if (*corr_cmd) return cmd_correlate(g, corr_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.field() << ": " << e.what() << '\n';
        return kConfig;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kUsage;
}
