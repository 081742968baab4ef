#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rti/classifier.hpp"
#include "rti/detector.hpp"
#include "rti/evaluation.hpp"
#include "rti/localization.hpp"
#include "rti/scenario.hpp"

namespace rti {

/// Deterministic child stream of a root seed, keyed by a purpose tag and an
/// index. Streams are independent of evaluation order.
std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index);

/// Reflection point on the object for a given node pair. The point model
/// returns the position itself; the circle model returns the boundary point
/// minimizing the reflected path length (specular point), to 1e-9 m.
/// Throws NumericalError when a node lies inside the circle.
Vec2 reflection_point(Vec2 object_pos, ObjectKind kind, double radius, Vec2 p_t, Vec2 p_r);

/// Object motion over the active phase. Positions are exact arc-length
/// interpolations on the generating polyline.
class Trajectory {
public:
    static Trajectory build(const TrajectorySpec& spec, const Grid& grid, double duration,
                            std::mt19937_64& rng);

    bool present() const { return kind_ != TrajectoryKind::absent; }
    Vec2 position(double t) const;

private:
    TrajectoryKind kind_ = TrajectoryKind::absent;
    std::vector<Vec2> points_;
    std::vector<double> cumulative_; // arc length at each waypoint
    double speed_ = 0.0;
    double dwell_ = 0.0;  // standstill
    bool wrap_ = false;   // waypoints loop when the path is exhausted
};

/// One synthesized measurement.
struct FrameRecord {
    std::int64_t frame = 0;
    double time_s = 0.0;
    int link = 0;
    int channel = 0;
    double rss_db = 0.0;
    bool object_present = false;
    Vec2 truth; // valid when object_present
};

/// RSS generator: LoS power per link plus the reflection effect of the object
/// plus one measurement-noise draw from the link's stream, then quantization.
class RssSynthesizer {
public:
    explicit RssSynthesizer(const ScenarioConfig& cfg);
    double rss_db(int link_id, bool present, Vec2 object_pos);
    double los_baseline_db(int link_id) const { return p0_db_[static_cast<std::size_t>(link_id)]; }

private:
    const ScenarioConfig& cfg_;
    NoiseModel noise_;
    std::vector<double> p0_db_;   // per link, includes injected fade offsets
    std::vector<double> length_;  // per link
    std::vector<double> freq_;    // per link
    std::vector<std::mt19937_64> rng_; // per link noise stream
};

/// Streaming estimator of the vacant-environment baseline per link.
class BaselineAccumulator {
public:
    BaselineAccumulator(std::size_t link_count, BaselineMode mode);
    void add(int link_id, double rss_db);
    /// Per-link baselines; throws ConfigError listing links with no samples.
    std::vector<double> finish(const Deployment& dep) const;

private:
    BaselineMode mode_;
    std::vector<double> sum_;
    std::vector<std::int64_t> count_;
    std::vector<std::map<double, std::int64_t>> histogram_; // mode estimation
    std::vector<double> last_;
};

/// One estimates.csv row. Estimates are produced once per complete round-robin
/// frame cycle (every link and channel observed exactly once).
struct EstimateRow {
    std::int64_t frame = 0; // id of the cycle's last frame
    double time_s = 0.0;
    bool has_truth = false;
    Vec2 truth;
    bool ok = false; // false = no occupancy detected
    Vec2 estimate;
    double error_m = 0.0; // valid when ok && has_truth
    int support_pixels = 0;
    int detecting_links = 0;
    bool disconnected = false;
};

/// Classifier -> detector -> back-projection -> estimator, applied to one
/// frame cycle of raw RSS values. Shared by the simulator and the replay
/// command so both produce identical estimates.
class Pipeline {
public:
    Pipeline(const ScenarioConfig& cfg, const CalibrationResult& calibration);

    EstimateRow process_cycle(std::span<const double> rss_db, std::int64_t last_frame,
                              double time_s, bool has_truth, Vec2 truth);

    /// Pair detection bits of the most recent cycle, packed little-endian.
    const std::vector<std::uint8_t>& last_detection_bits() const { return packed_; }
    const OccupancyField& last_field() const { return field_; }
    const OpCounters& counters() const { return counters_; }
    int usable_pairs() const;
    double mean_threshold_db() const;

private:
    const ScenarioConfig& cfg_;
    const CalibrationResult& calibration_;
    DetectorConfig detector_;
    WeightMatrix weights_;
    std::optional<RegionPartition> partition_;
    OpCounters counters_;
    OccupancyField field_;
    std::vector<double> smoothed_; // per link observation history sums
    std::vector<std::vector<double>> history_;
    int history_pos_ = 0;
    std::int64_t cycles_seen_ = 0;
    std::vector<std::uint8_t> link_decisions_;
    std::vector<std::uint8_t> pair_detections_;
    std::vector<std::uint8_t> packed_;
};

struct ScenarioSummary {
    std::size_t cycles = 0;
    std::size_t estimate_rows = 0;
    std::size_t ok_rows = 0;
    std::size_t error_samples = 0; // ok rows with truth
    std::vector<double> errors;
    std::optional<ErrorStats> stats;
    double detection_rate = 0.0;      // detecting usable pairs per cycle / usable pairs
    double mean_support_pixels = 0.0; // over ok rows
    double mean_threshold_db = 0.0;
    OpCounters counters;
};

/// Execute a full synthetic run: calibration window, object phase, per-cycle
/// pipeline, and all output files (frames.csv, calibration.txt,
/// detections.bits, estimates.csv, report.txt/csv, histogram.csv, optional
/// PGM snapshots) under out_dir.
ScenarioSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                             bool quiet = true);

/// Replay recorded frames through the pipeline; writes estimates.csv only.
ScenarioSummary replay_frames(const ScenarioConfig& cfg, const CalibrationResult& calibration,
                              std::istream& frames, const std::string& frames_name,
                              std::ostream& estimates);

/// Derive the calibration file from recorded frames (object-absent rows).
CalibrationResult calibrate_from_frames(const ScenarioConfig& cfg, std::istream& frames,
                                        const std::string& frames_name);

void write_frames_header(std::ostream& out);
void write_frame(std::ostream& out, const FrameRecord& rec);
void write_estimates_header(std::ostream& out);
void write_estimate(std::ostream& out, const EstimateRow& row);

/// Evaluation + report files for a finished run.
void write_reports(const ScenarioConfig& cfg, const ScenarioSummary& summary,
                   const std::filesystem::path& out_dir);

} // namespace rti
