#include "rti/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <istream>
#include <limits>
#include <numbers>

#include "rti/channel.hpp"
#include "rti/errors.hpp"
#include "rti/noise.hpp"

namespace rti {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    std::uint64_t state = seed ^ fnv1a(tag) ^ (index * 0x9E3779B97F4A7C15ull);
    splitmix64(state);
    return std::mt19937_64(splitmix64(state));
}

Vec2 reflection_point(Vec2 object_pos, ObjectKind kind, double radius, Vec2 p_t, Vec2 p_r) {
    if (kind == ObjectKind::point) return object_pos;
    if (!(radius > 0.0)) throw std::domain_error("reflection_point: circle radius must be > 0");
    if ((p_t - object_pos).norm() <= radius || (p_r - object_pos).norm() <= radius)
        throw NumericalError("reflection_point: a node lies inside the object circle");

    auto at = [&](double theta) -> Vec2 {
        return {object_pos.x + radius * std::cos(theta), object_pos.y + radius * std::sin(theta)};
    };
    auto path = [&](double theta) {
        const Vec2 q = at(theta);
        return (q - p_t).norm() + (q - p_r).norm();
    };

    constexpr int scan = 48;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan; ++i) {
        const double v = path(2.0 * std::numbers::pi * i / scan);
        if (v < best_value) { best_value = v; best = i; }
    }
    double lo = 2.0 * std::numbers::pi * (best - 1) / scan;
    double hi = 2.0 * std::numbers::pi * (best + 1) / scan;

    const double tol = std::max(1e-9 / radius, 1e-13);
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = path(x1);
    double f2 = path(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = path(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = path(x2);
        }
    }
    return at(0.5 * (lo + hi));
}

Trajectory Trajectory::build(const TrajectorySpec& spec, const Grid& grid, double duration,
                             std::mt19937_64& rng) {
    Trajectory traj;
    traj.kind_ = spec.kind;
    switch (spec.kind) {
        case TrajectoryKind::absent:
            break;
        case TrajectoryKind::standstill:
            traj.points_ = spec.points;
            traj.dwell_ = spec.dwell;
            break;
        case TrajectoryKind::waypoints:
            traj.points_ = spec.waypoints;
            traj.speed_ = spec.speed;
            traj.wrap_ = true;
            break;
        case TrajectoryKind::random_walk: {
            traj.speed_ = spec.speed;
            const double m = spec.wall_margin;
            const double x0 = grid.origin.x + m, x1 = grid.origin.x + grid.cols * grid.pixel_size - m;
            const double y0 = grid.origin.y + m, y1 = grid.origin.y + grid.rows * grid.pixel_size - m;
            if (!(x1 > x0 && y1 > y0))
                throw ConfigError("random_walk: wall_margin leaves no room inside the grid");
            Vec2 pos{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
            traj.points_.push_back(pos);
            std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
            std::uniform_real_distribution<double> seg_len(0.5, 2.5);
            double total = 0.0;
            const double needed = spec.speed * duration + 1.0;
            while (total < needed) {
                const double theta = angle(rng);
                const Vec2 dir{std::cos(theta), std::sin(theta)};
                // distance to the inset rectangle along dir
                double limit = std::numeric_limits<double>::infinity();
                if (dir.x > 0) limit = std::min(limit, (x1 - pos.x) / dir.x);
                if (dir.x < 0) limit = std::min(limit, (x0 - pos.x) / dir.x);
                if (dir.y > 0) limit = std::min(limit, (y1 - pos.y) / dir.y);
                if (dir.y < 0) limit = std::min(limit, (y0 - pos.y) / dir.y);
                const double step = std::min(seg_len(rng), limit);
                if (step < 0.05) continue; // facing a wall, redraw
                pos += dir * step;
                traj.points_.push_back(pos);
                total += step;
            }
            break;
        }
    }
    if (!traj.points_.empty()) {
        traj.cumulative_.resize(traj.points_.size(), 0.0);
        for (std::size_t i = 1; i < traj.points_.size(); ++i)
            traj.cumulative_[i] =
                traj.cumulative_[i - 1] + (traj.points_[i] - traj.points_[i - 1]).norm();
    }
    return traj;
}

Vec2 Trajectory::position(double t) const {
    if (kind_ == TrajectoryKind::absent)
        throw std::logic_error("Trajectory::position called for an absent object");
    if (kind_ == TrajectoryKind::standstill) {
        const auto idx = static_cast<std::size_t>(std::max(0.0, t) / dwell_);
        return points_[idx % points_.size()];
    }
    const double total = cumulative_.back();
    if (total <= 0.0) return points_.front();
    double s = speed_ * std::max(0.0, t);
    if (wrap_) s = std::fmod(s, total);
    else s = std::min(s, total);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t hi = std::min(static_cast<std::size_t>(it - cumulative_.begin()),
                                    points_.size() - 1);
    const std::size_t lo = hi - 1;
    const double seg = cumulative_[hi] - cumulative_[lo];
    const double frac = seg > 0.0 ? (s - cumulative_[lo]) / seg : 0.0;
    return points_[lo] + (points_[hi] - points_[lo]) * frac;
}

RssSynthesizer::RssSynthesizer(const ScenarioConfig& cfg) : cfg_(cfg), noise_(cfg.noise_model()) {
    const std::size_t link_count = cfg.deployment.link_count();
    p0_db_.resize(link_count);
    length_.resize(link_count);
    freq_.resize(link_count);
    rng_.reserve(link_count);
    for (std::size_t l = 0; l < link_count; ++l) {
        const int channel = cfg.deployment.links[l].channel;
        length_[l] = cfg.deployment.link_length(static_cast<int>(l));
        freq_[l] = cfg.deployment.channel_frequencies.at(channel);
        const PathLossParams params{cfg.p_s, cfg.p1.at(channel), cfg.d_1, cfg.eta};
        p0_db_[l] = los_power(params, length_[l]);
        if (auto it = cfg.fade_injection_db.find(static_cast<int>(l));
            it != cfg.fade_injection_db.end())
            p0_db_[l] += it->second;
        rng_.push_back(make_stream(cfg.seed, "noise", l));
    }
}

double RssSynthesizer::rss_db(int link_id, bool present, Vec2 object_pos) {
    const auto l = static_cast<std::size_t>(link_id);
    double clean = p0_db_[l];
    if (present) {
        const Vec2 tx = cfg_.deployment.tx_position(link_id);
        const Vec2 rx = cfg_.deployment.rx_position(link_id);
        const Vec2 q = reflection_point(object_pos, cfg_.object_kind, cfg_.object_radius, tx, rx);
        const double delta = excess_path_length(q, tx, rx);
        clean += zeta(delta, {cfg_.gamma, cfg_.eta, length_[l], freq_[l]});
    }
    const double rss = clean + measurement_noise_db(noise_, db_to_linear(clean), rng_[l]);
    return quantize_db(rss, cfg_.quantization_step_db);
}

BaselineAccumulator::BaselineAccumulator(std::size_t link_count, BaselineMode mode)
    : mode_(mode),
      sum_(link_count, 0.0),
      count_(link_count, 0),
      last_(link_count, 0.0) {
    if (mode_ == BaselineMode::histogram_mode) histogram_.resize(link_count);
}

void BaselineAccumulator::add(int link_id, double rss_db) {
    const auto l = static_cast<std::size_t>(link_id);
    sum_[l] += rss_db;
    ++count_[l];
    last_[l] = rss_db;
    if (mode_ == BaselineMode::histogram_mode) ++histogram_[l][rss_db];
}

std::vector<double> BaselineAccumulator::finish(const Deployment& dep) const {
    std::string missing;
    for (std::size_t l = 0; l < count_.size(); ++l) {
        if (count_[l] == 0) {
            if (!missing.empty()) missing += ", ";
            missing += std::to_string(l) + " (tx=" + std::to_string(dep.links[l].tx) +
                       ", rx=" + std::to_string(dep.links[l].rx) +
                       ", channel=" + std::to_string(dep.links[l].channel) + ")";
        }
    }
    if (!missing.empty())
        throw ConfigError("no calibration frames for links: " + missing);

    std::vector<double> baseline(count_.size());
    for (std::size_t l = 0; l < count_.size(); ++l) {
        switch (mode_) {
            case BaselineMode::mean:
                baseline[l] = sum_[l] / static_cast<double>(count_[l]);
                break;
            case BaselineMode::histogram_mode: {
                std::int64_t best = -1;
                for (const auto& [value, n] : histogram_[l]) {
                    if (n > best) { best = n; baseline[l] = value; }
                }
                break;
            }
            case BaselineMode::single_frame:
                baseline[l] = last_[l];
                break;
        }
    }
    return baseline;
}

Pipeline::Pipeline(const ScenarioConfig& cfg, const CalibrationResult& calibration)
    : cfg_(cfg), calibration_(calibration) {
    const Deployment& dep = cfg.deployment;
    if (calibration.baseline_db.size() != dep.link_count() ||
        calibration.pair_usable.size() != dep.pair_count())
        throw ConfigError("calibration does not match the deployment link table");

    detector_ = make_detector_config(dep, cfg.gamma, cfg.eta, cfg.delta_t);
    const IndicatorMatrix indicator = build_indicator(cfg.grid, dep, cfg.delta_t);
    std::vector<double> pair_lengths;
    pair_lengths.reserve(dep.pair_count());
    for (std::size_t p = 0; p < dep.pair_count(); ++p)
        pair_lengths.push_back(dep.pair_length(static_cast<int>(p)));
    weights_ = build_weights(indicator, cfg.scale_mode, pair_lengths, cfg.delta_t);
    if (cfg.partitions > 1)
        partition_.emplace(partition_regions(cfg.grid, cfg.partitions, weights_));

    link_decisions_.resize(dep.link_count(), 0);
    pair_detections_.resize(dep.pair_count(), 0);
    if (cfg.smoothing_window > 0) {
        smoothed_.assign(dep.link_count(), 0.0);
        history_.assign(dep.link_count(),
                        std::vector<double>(static_cast<std::size_t>(cfg.smoothing_window), 0.0));
    }
}

int Pipeline::usable_pairs() const {
    int n = 0;
    for (std::uint8_t u : calibration_.pair_usable) n += u ? 1 : 0;
    return n;
}

double Pipeline::mean_threshold_db() const {
    double sum = 0.0;
    for (double t : detector_.thresholds) sum += t;
    return detector_.thresholds.empty() ? 0.0 : sum / static_cast<double>(detector_.thresholds.size());
}

EstimateRow Pipeline::process_cycle(std::span<const double> rss_db, std::int64_t last_frame,
                                    double time_s, bool has_truth, Vec2 truth) {
    const Deployment& dep = cfg_.deployment;
    if (rss_db.size() != dep.link_count())
        throw std::invalid_argument("process_cycle: need one RSS value per link");

    static thread_local std::vector<double> z;
    z.assign(rss_db.size(), 0.0);
    for (std::size_t l = 0; l < rss_db.size(); ++l)
        z[l] = rss_db[l] - calibration_.baseline_db[l];

    if (cfg_.smoothing_window > 0) {
        const auto w = static_cast<std::size_t>(cfg_.smoothing_window);
        for (std::size_t l = 0; l < z.size(); ++l) {
            smoothed_[l] += z[l] - history_[l][static_cast<std::size_t>(history_pos_)];
            history_[l][static_cast<std::size_t>(history_pos_)] = z[l];
        }
        ++cycles_seen_;
        history_pos_ = (history_pos_ + 1) % cfg_.smoothing_window;
        const double denom = static_cast<double>(std::min<std::int64_t>(cycles_seen_, w));
        for (std::size_t l = 0; l < z.size(); ++l) z[l] = smoothed_[l] / denom;
    }

    for (std::size_t l = 0; l < z.size(); ++l)
        link_decisions_[l] =
            decide(z[l], detector_.thresholds[static_cast<std::size_t>(dep.pair_of_link(
                             static_cast<int>(l)))])
                ? 1
                : 0;

    static thread_local std::vector<std::uint8_t> channel_votes;
    for (std::size_t p = 0; p < dep.pair_count(); ++p) {
        channel_votes.clear();
        for (int l : dep.links_of_pair(static_cast<int>(p)))
            channel_votes.push_back(link_decisions_[static_cast<std::size_t>(l)]);
        pair_detections_[p] = majority_vote(channel_votes) ? 1 : 0;
    }
    packed_ = pack_bits(pair_detections_);

    field_ = partition_ ? partition_->field(cfg_.grid, calibration_.pair_usable, pair_detections_,
                                            &counters_)
                        : occupancy_field(weights_, cfg_.grid, calibration_.pair_usable,
                                          pair_detections_, &counters_);

    EstimateRow row;
    row.frame = last_frame;
    row.time_s = time_s;
    row.has_truth = has_truth;
    row.truth = truth;
    for (std::size_t p = 0; p < dep.pair_count(); ++p)
        row.detecting_links += (pair_detections_[p] && calibration_.pair_usable[p]) ? 1 : 0;

    const std::optional<MaskedField> masked = threshold_field(field_, cfg_.mode_threshold_scale);
    if (masked) {
        const PositionEstimate est = estimate_position(*masked, cfg_.grid);
        row.ok = true;
        row.estimate = est.position;
        row.support_pixels = est.support_pixels;
        row.disconnected = est.disconnected;
        if (has_truth) row.error_m = distance_error(est.position, truth);
        else row.error_m = std::numeric_limits<double>::quiet_NaN();
    } else {
        row.ok = false;
        row.estimate = {std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
        row.error_m = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

void write_frames_header(std::ostream& out) {
    out << "frame,time_s,link,channel,rss_db,true_x,true_y\n";
}

void write_frame(std::ostream& out, const FrameRecord& rec) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << rec.frame << ',' << format_double(rec.time_s) << ',' << rec.link << ',' << rec.channel
        << ',' << format_double(rec.rss_db) << ','
        << format_double(rec.object_present ? rec.truth.x : nan) << ','
        << format_double(rec.object_present ? rec.truth.y : nan) << '\n';
}

void write_estimates_header(std::ostream& out) {
    out << "frame,time_s,true_x,true_y,est_x,est_y,error_m,support_pixels,detecting_links,status\n";
}

void write_estimate(std::ostream& out, const EstimateRow& row) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << row.frame << ',' << format_double(row.time_s) << ','
        << format_double(row.has_truth ? row.truth.x : nan) << ','
        << format_double(row.has_truth ? row.truth.y : nan) << ','
        << format_double(row.estimate.x) << ',' << format_double(row.estimate.y) << ','
        << format_double(row.error_m) << ',' << row.support_pixels << ',' << row.detecting_links
        << ',' << (row.ok ? "ok" : "no_occupancy") << '\n';
}

namespace {

struct SummaryBuilder {
    ScenarioSummary summary;
    std::size_t motion_rows = 0;
    std::uint64_t motion_detections = 0;
    std::uint64_t support_sum = 0;

    void add(const EstimateRow& row, bool motion_phase) {
        ++summary.estimate_rows;
        if (row.ok) {
            ++summary.ok_rows;
            support_sum += static_cast<std::uint64_t>(row.support_pixels);
            if (row.has_truth) {
                summary.errors.push_back(row.error_m);
                ++summary.error_samples;
            }
        }
        if (motion_phase) {
            ++motion_rows;
            motion_detections += static_cast<std::uint64_t>(row.detecting_links);
        }
    }

    ScenarioSummary finish(const Pipeline& pipe) {
        summary.cycles = summary.estimate_rows;
        if (!summary.errors.empty()) summary.stats = error_stats(summary.errors);
        const int usable = pipe.usable_pairs();
        if (motion_rows > 0 && usable > 0)
            summary.detection_rate = static_cast<double>(motion_detections) /
                                     (static_cast<double>(motion_rows) * usable);
        if (summary.ok_rows > 0)
            summary.mean_support_pixels =
                static_cast<double>(support_sum) / static_cast<double>(summary.ok_rows);
        summary.mean_threshold_db = pipe.mean_threshold_db();
        summary.counters = pipe.counters();
        return summary;
    }
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

ScenarioSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                             bool quiet) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "'");

    const Deployment& dep = cfg.deployment;
    const std::size_t link_count = dep.link_count();
    const double cycle_time = static_cast<double>(link_count) * cfg.frame_interval;
    const auto calib_cycles =
        static_cast<std::size_t>(std::ceil(cfg.calibration_duration / cycle_time - 1e-12));
    const auto motion_cycles =
        static_cast<std::size_t>(std::ceil(cfg.duration / cycle_time - 1e-12));
    if (calib_cycles == 0)
        throw ConfigError("calibration_duration must cover at least one frame cycle");

    std::mt19937_64 trajectory_rng = make_stream(cfg.seed, "trajectory", 0);
    const Trajectory trajectory = Trajectory::build(
        cfg.trajectory, cfg.grid, static_cast<double>(motion_cycles) * cycle_time, trajectory_rng);
    RssSynthesizer synth(cfg);

    std::ofstream frames = open_output(out_dir / "frames.csv");
    std::ofstream estimates = open_output(out_dir / "estimates.csv");
    std::ofstream bits = open_output(out_dir / "detections.bits");
    write_frames_header(frames);
    write_estimates_header(estimates);

    BaselineAccumulator baseline(link_count, cfg.baseline_mode);
    std::vector<std::vector<double>> calibration_cycles_rss;
    calibration_cycles_rss.reserve(calib_cycles);

    std::int64_t frame = 0;
    FrameRecord rec;
    for (std::size_t c = 0; c < calib_cycles; ++c) {
        std::vector<double> rss(link_count);
        for (std::size_t l = 0; l < link_count; ++l, ++frame) {
            rec.frame = frame;
            rec.time_s = static_cast<double>(frame) * cfg.frame_interval;
            rec.link = static_cast<int>(l);
            rec.channel = dep.links[l].channel;
            rec.object_present = false;
            rec.rss_db = synth.rss_db(static_cast<int>(l), false, {});
            write_frame(frames, rec);
            baseline.add(static_cast<int>(l), rec.rss_db);
            rss[l] = rec.rss_db;
        }
        calibration_cycles_rss.push_back(std::move(rss));
    }

    const std::vector<double> baselines = baseline.finish(dep);
    const CalibrationResult calibration =
        classify_deployment(dep, baselines, cfg.p_s, cfg.d_1, cfg.fade_threshold_db);
    {
        std::ofstream cal = open_output(out_dir / "calibration.txt");
        save_calibration(cal, calibration);
    }

    Pipeline pipe(cfg, calibration);
    SummaryBuilder builder;
    auto emit = [&](const EstimateRow& row, bool motion_phase) {
        write_estimate(estimates, row);
        const std::vector<std::uint8_t>& packed = pipe.last_detection_bits();
        bits.write(reinterpret_cast<const char*>(packed.data()),
                   static_cast<std::streamsize>(packed.size()));
        builder.add(row, motion_phase);
    };

    // Calibration cycles are replayed against the final baselines so a replay
    // of frames.csv reproduces estimates.csv byte for byte.
    for (std::size_t c = 0; c < calibration_cycles_rss.size(); ++c) {
        const std::int64_t last = static_cast<std::int64_t>((c + 1) * link_count) - 1;
        const EstimateRow row =
            pipe.process_cycle(calibration_cycles_rss[c], last,
                               static_cast<double>(last) * cfg.frame_interval, false, {});
        emit(row, false);
    }
    calibration_cycles_rss.clear();
    calibration_cycles_rss.shrink_to_fit();

    const double motion_start = static_cast<double>(frame) * cfg.frame_interval;
    double next_snapshot = cfg.snapshot_interval > 0.0 ? cfg.snapshot_interval : -1.0;
    std::size_t snapshot_id = 0;
    std::vector<double> rss(link_count);
    const bool present = trajectory.present();
    for (std::size_t c = 0; c < motion_cycles; ++c) {
        Vec2 truth;
        for (std::size_t l = 0; l < link_count; ++l, ++frame) {
            rec.frame = frame;
            rec.time_s = static_cast<double>(frame) * cfg.frame_interval;
            rec.link = static_cast<int>(l);
            rec.channel = dep.links[l].channel;
            rec.object_present = present;
            if (present) {
                rec.truth = trajectory.position(rec.time_s - motion_start);
                truth = rec.truth;
            }
            rec.rss_db = synth.rss_db(static_cast<int>(l), present, rec.truth);
            write_frame(frames, rec);
            rss[l] = rec.rss_db;
        }
        const std::int64_t last = frame - 1;
        const double last_time = static_cast<double>(last) * cfg.frame_interval;
        const EstimateRow row = pipe.process_cycle(rss, last, last_time, present, truth);
        emit(row, true);

        if (next_snapshot >= 0.0 && last_time - motion_start >= next_snapshot) {
            std::filesystem::create_directories(out_dir / "snapshots", ec);
            char name[32];
            std::snprintf(name, sizeof name, "cycle_%06zu.pgm", snapshot_id++);
            std::ofstream pgm = open_output(out_dir / "snapshots" / name);
            write_field_pgm(pipe.last_field(), pgm);
            next_snapshot += cfg.snapshot_interval;
        }
    }

    ScenarioSummary summary = builder.finish(pipe);
    write_reports(cfg, summary, out_dir);
    if (!quiet) {
        std::cout << "cycles=" << summary.cycles << " estimates_ok=" << summary.ok_rows
                  << " error_samples=" << summary.error_samples;
        if (summary.stats) std::cout << " mean_error_m=" << summary.stats->mean;
        std::cout << '\n';
    }
    return summary;
}

namespace {

struct ParsedFrame {
    std::int64_t frame = 0;
    double time_s = 0.0;
    int link = 0;
    int channel = 0;
    double rss_db = 0.0;
    bool present = false;
    Vec2 truth;
};

class FrameReader {
public:
    FrameReader(std::istream& in, const std::string& name, const Deployment& dep)
        : in_(in), name_(name), dep_(dep) {
        std::string header;
        if (!std::getline(in_, header))
            throw ConfigError(name_ + ": empty frames file");
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != "frame,time_s,link,channel,rss_db,true_x,true_y")
            throw ConfigError(name_ + ": unexpected header '" + header + "'");
    }

    std::optional<ParsedFrame> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            return parse(line);
        }
        return std::nullopt;
    }

private:
    ParsedFrame parse(const std::string& line) const {
        std::vector<std::string> fields = split_list(line, ',');
        if (fields.size() != 7)
            throw ConfigError(where() + ": expected 7 fields, got " + std::to_string(fields.size()));
        ParsedFrame f;
        auto frame = parse_int(fields[0]);
        auto time = parse_double(fields[1]);
        auto link = parse_int(fields[2]);
        auto channel = parse_int(fields[3]);
        auto rss = parse_double(fields[4]);
        auto tx = parse_double(fields[5]);
        auto ty = parse_double(fields[6]);
        if (!frame || !time || !link || !channel || !rss || !tx || !ty)
            throw ConfigError(where() + ": malformed frame row '" + line + "'");
        f.frame = *frame;
        f.time_s = *time;
        if (*link < 0 || *link >= static_cast<long long>(dep_.link_count()))
            throw ConfigError(where() + ": unknown link id " + std::to_string(*link));
        f.link = static_cast<int>(*link);
        if (dep_.links[static_cast<std::size_t>(f.link)].channel != static_cast<int>(*channel))
            throw ConfigError(where() + ": link " + std::to_string(f.link) +
                              " has channel " +
                              std::to_string(dep_.links[static_cast<std::size_t>(f.link)].channel) +
                              " in the deployment, frame says " + std::to_string(*channel));
        f.channel = static_cast<int>(*channel);
        f.rss_db = *rss;
        f.present = !std::isnan(*tx) && !std::isnan(*ty);
        if (f.present) f.truth = {*tx, *ty};
        return f;
    }

    std::string where() const { return name_ + ":" + std::to_string(line_no_ + 1); }

    std::istream& in_;
    std::string name_;
    const Deployment& dep_;
    std::size_t line_no_ = 0;
};

} // namespace

ScenarioSummary replay_frames(const ScenarioConfig& cfg, const CalibrationResult& calibration,
                              std::istream& frames, const std::string& frames_name,
                              std::ostream& estimates) {
    const std::size_t link_count = cfg.deployment.link_count();
    FrameReader reader(frames, frames_name, cfg.deployment);
    Pipeline pipe(cfg, calibration);
    SummaryBuilder builder;
    write_estimates_header(estimates);

    std::vector<double> rss(link_count);
    std::size_t in_cycle = 0;
    ParsedFrame last{};
    while (auto f = reader.next()) {
        if (static_cast<std::size_t>(f->link) != in_cycle)
            throw ConfigError(frames_name + ": round-robin order broken at frame " +
                              std::to_string(f->frame) + " (expected link " +
                              std::to_string(in_cycle) + ", got " + std::to_string(f->link) + ")");
        rss[in_cycle] = f->rss_db;
        last = *f;
        ++in_cycle;
        if (in_cycle == link_count) {
            const EstimateRow row =
                pipe.process_cycle(rss, last.frame, last.time_s, last.present, last.truth);
            write_estimate(estimates, row);
            builder.add(row, last.present);
            in_cycle = 0;
        }
    }
    if (in_cycle != 0)
        throw ConfigError(frames_name + ": incomplete trailing frame cycle (" +
                          std::to_string(in_cycle) + " of " + std::to_string(link_count) +
                          " frames)");
    return builder.finish(pipe);
}

CalibrationResult calibrate_from_frames(const ScenarioConfig& cfg, std::istream& frames,
                                        const std::string& frames_name) {
    FrameReader reader(frames, frames_name, cfg.deployment);
    BaselineAccumulator acc(cfg.deployment.link_count(), cfg.baseline_mode);
    while (auto f = reader.next())
        if (!f->present) acc.add(f->link, f->rss_db);
    const std::vector<double> baselines = acc.finish(cfg.deployment);
    return classify_deployment(cfg.deployment, baselines, cfg.p_s, cfg.d_1, cfg.fade_threshold_db);
}

void write_reports(const ScenarioConfig& cfg, const ScenarioSummary& summary,
                   const std::filesystem::path& out_dir) {
    ReportInputs inputs;
    inputs.parameters = cfg.parameter_echo();
    inputs.stats = summary.stats;
    inputs.significance = cfg.report.significance;
    inputs.comparisons = cfg.report.comparisons;
    inputs.counters = summary.counters;
    inputs.estimate_rows = summary.estimate_rows;
    inputs.no_occupancy_rows = summary.estimate_rows - summary.ok_rows;

    std::vector<double> positive;
    positive.reserve(summary.errors.size());
    for (double e : summary.errors)
        if (e > 0.0) positive.push_back(e);

    const DistFamily families[] = {DistFamily::rayleigh, DistFamily::gamma, DistFamily::lognormal};
    if (positive.size() >= 8) {
        for (DistFamily family : families) {
            const DistFit fit = fit_distribution(positive, family);
            inputs.fits.emplace_back(fit, ks_test(positive, fit, cfg.report.significance));
        }
    }

    {
        std::ofstream report = open_output(out_dir / "report.txt");
        report << render_report(inputs);
    }
    {
        std::ofstream csv = open_output(out_dir / "report.csv");
        write_report_csv(inputs, csv);
    }
    {
        std::ofstream hist = open_output(out_dir / "histogram.csv");
        if (!inputs.fits.empty()) {
            const DistFit* chosen = &inputs.fits.front().first;
            if (cfg.report.fit_family == "best") {
                double best_p = -1.0;
                for (const auto& [fit, ks] : inputs.fits)
                    if (ks.p_value > best_p) { best_p = ks.p_value; chosen = &fit; }
            } else {
                for (const auto& [fit, ks] : inputs.fits)
                    if (to_string(fit.family) == cfg.report.fit_family) chosen = &fit;
            }
            write_histogram_csv(histogram(positive, *chosen), hist);
        } else {
            write_histogram_csv({}, hist);
        }
    }
}

} // namespace rti
