// rti: detector-based radio tomographic imaging toolkit.
//
// Subcommands: simulate, calibrate, localize, evaluate, sweep, validate-config.
// Exit codes: 0 ok, 1 config/validation error, 2 I/O error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rti/detector.hpp"
#include "rti/errors.hpp"
#include "rti/evaluation.hpp"
#include "rti/keyval.hpp"
#include "rti/scenario.hpp"
#include "rti/simulator.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

rti::ScenarioConfig load_config(const CommonOptions& opts) {
    std::vector<std::string> overrides = opts.overrides;
    if (opts.seed) overrides.push_back("run.seed=" + std::to_string(*opts.seed));
    return rti::load_scenario(opts.config_path, overrides);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rti::IoError("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rti::IoError("cannot read '" + path.string() + "'");
    return in;
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw rti::IoError("cannot create output directory '" + dir + "'");
}

int run_simulate(const CommonOptions& opts) {
    const rti::ScenarioConfig cfg = load_config(opts); // validate before creating outputs
    make_out_dir(opts.out_dir);
    rti::run_scenario(cfg, opts.out_dir, opts.quiet);
    return 0;
}

int run_calibrate(const CommonOptions& opts, const std::string& frames_path) {
    const rti::ScenarioConfig cfg = load_config(opts);
    std::ifstream frames = open_in(frames_path);
    const rti::CalibrationResult cal =
        rti::calibrate_from_frames(cfg, frames, fs::path(frames_path).filename().string());
    make_out_dir(opts.out_dir);
    std::ofstream out = open_out(fs::path(opts.out_dir) / "calibration.txt");
    rti::save_calibration(out, cal);
    if (!opts.quiet) std::cout << "wrote " << (fs::path(opts.out_dir) / "calibration.txt").string() << '\n';
    return 0;
}

int run_localize(const CommonOptions& opts, const std::string& frames_path,
                 const std::string& calibration_path) {
    const rti::ScenarioConfig cfg = load_config(opts);
    std::ifstream cal_in = open_in(calibration_path);
    const rti::CalibrationResult cal = rti::load_calibration(
        cal_in, fs::path(calibration_path).filename().string(), cfg.deployment);
    std::ifstream frames = open_in(frames_path);
    make_out_dir(opts.out_dir);
    std::ofstream estimates = open_out(fs::path(opts.out_dir) / "estimates.csv");
    const rti::ScenarioSummary summary = rti::replay_frames(
        cfg, cal, frames, fs::path(frames_path).filename().string(), estimates);
    if (!opts.quiet)
        std::cout << "replayed " << summary.estimate_rows << " cycles, " << summary.ok_rows
                  << " with occupancy\n";
    return 0;
}

std::vector<rti::EstimateRow> read_estimates(const fs::path& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw rti::ConfigError(path.string() + ": empty estimates file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "frame,time_s,true_x,true_y,est_x,est_y,error_m,support_pixels,detecting_links,status")
        throw rti::ConfigError(path.string() + ": unexpected header '" + header + "'");
    std::vector<rti::EstimateRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = rti::split_list(line, ',');
        if (f.size() != 10)
            throw rti::ConfigError(path.string() + ":" + std::to_string(line_no) +
                                   ": expected 10 fields");
        rti::EstimateRow row;
        auto frame = rti::parse_int(f[0]);
        auto time = rti::parse_double(f[1]);
        auto tx = rti::parse_double(f[2]);
        auto ty = rti::parse_double(f[3]);
        auto ex = rti::parse_double(f[4]);
        auto ey = rti::parse_double(f[5]);
        auto err = rti::parse_double(f[6]);
        auto support = rti::parse_int(f[7]);
        auto detecting = rti::parse_int(f[8]);
        if (!frame || !time || !tx || !ty || !ex || !ey || !err || !support || !detecting)
            throw rti::ConfigError(path.string() + ":" + std::to_string(line_no) +
                                   ": malformed estimates row");
        row.frame = *frame;
        row.time_s = *time;
        row.has_truth = !std::isnan(*tx);
        row.truth = {*tx, *ty};
        row.estimate = {*ex, *ey};
        row.error_m = *err;
        row.support_pixels = static_cast<int>(*support);
        row.detecting_links = static_cast<int>(*detecting);
        row.ok = f[9] == "ok";
        rows.push_back(row);
    }
    return rows;
}

int run_evaluate(const CommonOptions& opts, const std::string& estimates_path) {
    const rti::ScenarioConfig cfg = load_config(opts);
    const std::vector<rti::EstimateRow> rows = read_estimates(estimates_path);
    rti::ScenarioSummary summary;
    summary.estimate_rows = rows.size();
    for (const rti::EstimateRow& row : rows) {
        if (!row.ok) continue;
        ++summary.ok_rows;
        if (row.has_truth && !std::isnan(row.error_m)) {
            summary.errors.push_back(row.error_m);
            ++summary.error_samples;
        }
    }
    summary.cycles = rows.size();
    if (!summary.errors.empty()) summary.stats = rti::error_stats(summary.errors);
    make_out_dir(opts.out_dir);
    rti::write_reports(cfg, summary, opts.out_dir);
    if (!opts.quiet && summary.stats)
        std::cout << "mean_error_m=" << summary.stats->mean << " over " << summary.error_samples
                  << " samples\n";
    return 0;
}

int run_sweep(const CommonOptions& opts, const std::string& param, const std::string& values_csv) {
    const auto [section, key] = rti::resolve_config_key(param);
    const std::vector<std::string> values = rti::split_list(values_csv, ',');
    if (values.empty()) throw rti::ConfigError("sweep: no values given");
    for (const std::string& v : values)
        if (!rti::parse_double(v))
            throw rti::ConfigError("sweep: parameter '" + param + "' needs numeric values, got '" +
                                   v + "'");

    make_out_dir(opts.out_dir);
    std::ofstream summary_csv = open_out(fs::path(opts.out_dir) / "sweep.csv");
    summary_csv << "parameter,value,mean_error_m,variance_m2,skewness,detection_rate,additions,"
                   "threshold_db,mean_support_pixels\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        CommonOptions run_opts = opts;
        run_opts.overrides.push_back(section + "." + key + "=" + values[i]);
        const rti::ScenarioConfig cfg = load_config(run_opts);
        const fs::path run_dir =
            fs::path(opts.out_dir) / ("run_" + std::to_string(i) + "_" + key + "=" + values[i]);
        const rti::ScenarioSummary s = rti::run_scenario(cfg, run_dir, true);
        summary_csv << section << '.' << key << ',' << values[i] << ','
                    << (s.stats ? rti::format_double(s.stats->mean) : "nan") << ','
                    << (s.stats ? rti::format_double(s.stats->variance) : "nan") << ','
                    << (s.stats && s.stats->skewness ? rti::format_double(*s.stats->skewness)
                                                     : "nan")
                    << ',' << rti::format_double(s.detection_rate) << ',' << s.counters.additions
                    << ',' << rti::format_double(s.mean_threshold_db) << ','
                    << rti::format_double(s.mean_support_pixels) << '\n';
        if (!opts.quiet)
            std::cout << key << "=" << values[i] << " done ("
                      << (s.stats ? rti::format_double(s.stats->mean) : "nan") << " m)\n";
    }
    return 0;
}

int run_validate(const CommonOptions& opts) {
    load_config(opts);
    if (!opts.quiet) std::cout << opts.config_path << ": ok\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detector-based radio tomographic imaging simulator and pipeline"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string frames_path, calibration_path, estimates_path, param, values;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", opts.config_path, "Scenario config file")->required();
        if (needs_out) cmd->add_option("--out", opts.out_dir, "Output directory")->required();
        cmd->add_option("--set", opts.overrides, "Override a config key (KEY=VALUE, repeatable)");
        cmd->add_option("--seed", opts.seed, "Override run.seed");
        cmd->add_flag("--quiet", opts.quiet, "Suppress progress output");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run a synthetic scenario end to end");
    add_common(simulate, true);

    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Build a calibration file from recorded frames");
    add_common(calibrate, true);
    calibrate->add_option("--frames", frames_path, "frames.csv to calibrate from")->required();

    CLI::App* localize =
        app.add_subcommand("localize", "Replay recorded frames through the pipeline");
    add_common(localize, true);
    localize->add_option("--frames", frames_path, "frames.csv to replay")->required();
    localize->add_option("--calibration", calibration_path, "calibration.txt")->required();

    CLI::App* evaluate = app.add_subcommand("evaluate", "Distance-error statistics and report");
    add_common(evaluate, true);
    evaluate->add_option("--estimates", estimates_path, "estimates.csv to evaluate")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run the scenario over a parameter sweep");
    add_common(sweep, true);
    sweep->add_option("--param", param, "Config key to sweep (e.g. channel_model.gamma)")
        ->required();
    sweep->add_option("--values", values, "Comma-separated numeric values")->required();

    CLI::App* validate = app.add_subcommand("validate-config", "Check a config file");
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(opts);
        if (calibrate->parsed()) return run_calibrate(opts, frames_path);
        if (localize->parsed()) return run_localize(opts, frames_path, calibration_path);
        if (evaluate->parsed()) return run_evaluate(opts, estimates_path);
        if (sweep->parsed()) return run_sweep(opts, param, values);
        if (validate->parsed()) return run_validate(opts);
    } catch (const rti::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const rti::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const rti::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
