#include "rti/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "rti/channel.hpp"
#include "rti/errors.hpp"

namespace rti {

namespace {

// Documented schema: section -> exact keys and dynamic key prefixes.
struct SectionSchema {
    const char* name;
    std::vector<const char*> keys;
    std::vector<const char*> prefixes;
};

const std::vector<SectionSchema>& schema() {
    static const std::vector<SectionSchema> s = {
        {"deployment",
         {"layout", "node_count", "area_width", "area_height", "perimeter_margin", "nodes",
          "links", "channels", "tx_power_dbm"},
         {"freq_"}},
        {"grid", {"pixel_size", "origin_x", "origin_y", "rows", "cols"}, {}},
        {"channel_model", {"gamma", "eta", "p1_db", "d1"}, {"p1_"}},
        {"noise", {"snr_db", "sigma2", "k_samples", "quantization_step_db"}, {}},
        {"schedule", {"frame_interval", "calibration_duration", "duration"}, {}},
        {"object", {"model", "radius"}, {}},
        {"trajectory", {"type", "speed", "waypoints", "points", "dwell", "wall_margin"}, {}},
        {"detector", {"delta_t", "smoothing_window"}, {}},
        {"classifier", {"fade_threshold_db", "baseline"}, {}},
        {"estimator", {"a"}, {}},
        {"reconstruction", {"scale_mode", "partitions"}, {}},
        {"faults", {}, {"fade_link_"}},
        {"run", {"seed", "snapshot_interval"}, {}},
        {"report", {"significance", "fit_family", "comparisons"}, {}},
    };
    return s;
}

class Reader {
public:
    Reader(const KeyValueFile& file, const std::string& source) : file_(file), source_(source) {}

    std::string where(const std::string& section, const std::string& key) const {
        return source_ + ": [" + section + "] " + key;
    }

    const std::string* raw(const std::string& section, const std::string& key) const {
        return file_.find(section, key);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const std::string* v = raw(section, key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const std::string* v = raw(section, key);
        if (!v) return fallback;
        auto parsed = parse_double(*v);
        if (!parsed) throw ConfigError(where(section, key) + ": bad number '" + *v + "'");
        return *parsed;
    }

    double require_double(const std::string& section, const std::string& key) const {
        const std::string* v = raw(section, key);
        if (!v) throw ConfigError(where(section, key) + ": required key is missing");
        auto parsed = parse_double(*v);
        if (!parsed) throw ConfigError(where(section, key) + ": bad number '" + *v + "'");
        return *parsed;
    }

    long long get_int(const std::string& section, const std::string& key, long long fallback) const {
        const std::string* v = raw(section, key);
        if (!v) return fallback;
        auto parsed = parse_int(*v);
        if (!parsed) throw ConfigError(where(section, key) + ": bad integer '" + *v + "'");
        return *parsed;
    }

    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
        const std::string* v = raw(section, key);
        if (!v) return fallback;
        auto parsed = parse_uint(*v);
        if (!parsed) throw ConfigError(where(section, key) + ": bad unsigned integer '" + *v + "'");
        return *parsed;
    }

    std::vector<Vec2> get_points(const std::string& section, const std::string& key) const {
        const std::string* v = raw(section, key);
        if (!v) return {};
        std::vector<Vec2> out;
        for (const std::string& item : split_list(*v, ';')) {
            const std::vector<std::string> coords = split_list(item, ',');
            if (coords.size() != 2)
                throw ConfigError(where(section, key) + ": expected 'x,y' pairs, got '" + item + "'");
            auto x = parse_double(coords[0]);
            auto y = parse_double(coords[1]);
            if (!x || !y)
                throw ConfigError(where(section, key) + ": bad coordinate in '" + item + "'");
            out.push_back({*x, *y});
        }
        return out;
    }

    // (suffix, value) for every key in the section starting with prefix.
    std::vector<std::pair<std::string, std::string>> prefixed(const std::string& section,
                                                              const std::string& prefix) const {
        std::vector<std::pair<std::string, std::string>> out;
        const KeyValueFile::Section* s = file_.find_section(section);
        if (!s) return out;
        for (const auto& [k, v] : s->entries)
            if (k.rfind(prefix, 0) == 0) out.emplace_back(k.substr(prefix.size()), v);
        return out;
    }

    void reject_unknown() const {
        for (const KeyValueFile::Section& section : file_.sections) {
            const SectionSchema* matched = nullptr;
            for (const SectionSchema& s : schema())
                if (section.name == s.name) { matched = &s; break; }
            if (!matched)
                throw ConfigError(source_ + ": unknown section [" + section.name + "]");
            for (const auto& [k, v] : section.entries) {
                bool known = std::any_of(matched->keys.begin(), matched->keys.end(),
                                         [&](const char* key) { return k == key; });
                if (!known)
                    known = std::any_of(matched->prefixes.begin(), matched->prefixes.end(),
                                        [&](const char* p) { return k.rfind(p, 0) == 0; });
                if (!known)
                    throw ConfigError(source_ + ": unknown key '" + k + "' in section [" +
                                      section.name + "]");
            }
        }
    }

private:
    const KeyValueFile& file_;
    std::string source_;
};

std::vector<Vec2> perimeter_nodes(double width, double height, double margin, int count) {
    const double w = width + 2.0 * margin;
    const double h = height + 2.0 * margin;
    const double perimeter = 2.0 * (w + h);
    const double step = perimeter / count;
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        double s = k * step;
        Vec2 p;
        if (s < w) p = {s, 0.0};
        else if (s < w + h) p = {w, s - w};
        else if (s < 2.0 * w + h) p = {2.0 * w + h - s, h};
        else p = {0.0, perimeter - s};
        nodes.push_back({p.x - margin, p.y - margin});
    }
    return nodes;
}

Deployment parse_deployment(const Reader& r, double area_width, double area_height) {
    Deployment dep;

    std::vector<int> channels;
    for (const std::string& item : split_list(r.get_string("deployment", "channels", "11"), ',')) {
        auto c = parse_int(item);
        if (!c) throw ConfigError(r.where("deployment", "channels") + ": bad channel '" + item + "'");
        channels.push_back(static_cast<int>(*c));
    }
    if (channels.empty())
        throw ConfigError(r.where("deployment", "channels") + ": at least one channel required");

    const std::string layout = r.get_string("deployment", "layout", "explicit");
    if (layout == "perimeter") {
        const int count = static_cast<int>(r.get_int("deployment", "node_count", 0));
        if (count < 2)
            throw ConfigError(r.where("deployment", "node_count") + ": need at least 2 nodes");
        const double margin = r.get_double("deployment", "perimeter_margin", 0.0);
        dep.node_positions = perimeter_nodes(area_width, area_height, margin, count);
    } else if (layout == "explicit") {
        dep.node_positions = r.get_points("deployment", "nodes");
        if (dep.node_positions.size() < 2)
            throw ConfigError(r.where("deployment", "nodes") + ": need at least 2 nodes");
    } else {
        throw ConfigError(r.where("deployment", "layout") + ": expected 'perimeter' or 'explicit', got '" +
                          layout + "'");
    }

    const std::string links = r.get_string("deployment", "links", "all_pairs");
    if (links == "all_pairs") {
        // Channel-major round robin: a full sweep of node pairs per channel.
        const int m = static_cast<int>(dep.node_positions.size());
        for (int c : channels)
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) dep.links.push_back({i, j, c});
    } else {
        const std::set<int> channel_set(channels.begin(), channels.end());
        for (const std::string& item : split_list(links, ';')) {
            const std::vector<std::string> parts = split_list(item, ',');
            if (parts.size() != 3)
                throw ConfigError(r.where("deployment", "links") + ": expected 'tx,rx,channel' triples");
            auto tx = parse_int(parts[0]);
            auto rx = parse_int(parts[1]);
            auto ch = parse_int(parts[2]);
            if (!tx || !rx || !ch)
                throw ConfigError(r.where("deployment", "links") + ": bad triple '" + item + "'");
            if (!channel_set.count(static_cast<int>(*ch)))
                throw ConfigError(r.where("deployment", "links") + ": channel " +
                                  std::to_string(*ch) + " is not in the channel list");
            dep.links.push_back({static_cast<int>(*tx), static_cast<int>(*rx), static_cast<int>(*ch)});
        }
    }

    for (const auto& [suffix, value] : r.prefixed("deployment", "freq_")) {
        auto channel = parse_int(suffix);
        auto freq = parse_double(value);
        if (!channel || !freq || !(*freq > 0.0))
            throw ConfigError(r.where("deployment", "freq_" + suffix) + ": bad frequency override");
        dep.channel_frequencies[static_cast<int>(*channel)] = *freq;
    }

    try {
        dep.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(r.where("deployment", "nodes/links") + ": " + e.what());
    }
    return dep;
}

} // namespace

double ScenarioConfig::noise_sigma2() const {
    if (sigma2 > 0.0) return sigma2;
    // snr_db pins the LoS SNR of the weakest (lowest-power) link.
    double min_p0 = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < deployment.link_count(); ++l) {
        const PathLossParams params{p_s, p1.at(deployment.links[l].channel), d_1, eta};
        min_p0 = std::min(min_p0, los_power(params, deployment.link_length(static_cast<int>(l))));
    }
    return std::pow(10.0, min_p0 / 10.0) / std::pow(10.0, snr_db / 10.0);
}

NoiseModel ScenarioConfig::noise_model() const {
    return {noise_sigma2(), k_samples, quantization_step_db};
}

ScenarioConfig parse_scenario(const KeyValueFile& file, const std::string& source_name) {
    Reader r(file, source_name);
    r.reject_unknown();

    ScenarioConfig cfg;

    cfg.area_width = r.get_double("deployment", "area_width", 0.0);
    cfg.area_height = r.get_double("deployment", "area_height", 0.0);
    const std::string layout = r.get_string("deployment", "layout", "explicit");
    if (layout == "perimeter" && (!(cfg.area_width > 0.0) || !(cfg.area_height > 0.0)))
        throw ConfigError(r.where("deployment", "area_width") +
                          ": perimeter layout needs positive area_width and area_height");
    cfg.deployment = parse_deployment(r, cfg.area_width, cfg.area_height);
    cfg.p_s = r.get_double("deployment", "tx_power_dbm", 0.0);

    // Grid defaults to covering [0, area_width] x [0, area_height].
    cfg.grid.pixel_size = r.get_double("grid", "pixel_size", 0.0625);
    cfg.grid.origin = {r.get_double("grid", "origin_x", 0.0), r.get_double("grid", "origin_y", 0.0)};
    const int default_cols =
        cfg.area_width > 0.0 ? static_cast<int>(std::lround(cfg.area_width / cfg.grid.pixel_size)) : 0;
    const int default_rows =
        cfg.area_height > 0.0 ? static_cast<int>(std::lround(cfg.area_height / cfg.grid.pixel_size)) : 0;
    cfg.grid.cols = static_cast<int>(r.get_int("grid", "cols", default_cols));
    cfg.grid.rows = static_cast<int>(r.get_int("grid", "rows", default_rows));
    try {
        cfg.grid.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source_name + ": [grid] " + e.what());
    }

    cfg.gamma = r.get_double("channel_model", "gamma", 0.5);
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw ConfigError(r.where("channel_model", "gamma") + ": must be in (0, 1)");
    cfg.eta = r.get_double("channel_model", "eta", 2.0);
    if (!(cfg.eta > 0.0)) throw ConfigError(r.where("channel_model", "eta") + ": must be > 0");
    cfg.d_1 = r.get_double("channel_model", "d1", 1.0);
    if (!(cfg.d_1 > 0.0)) throw ConfigError(r.where("channel_model", "d1") + ": must be > 0");

    const double p1_shared = r.get_double("channel_model", "p1_db", 40.0);
    for (int c : cfg.deployment.channels()) cfg.p1[c] = p1_shared;
    for (const auto& [suffix, value] : r.prefixed("channel_model", "p1_")) {
        if (suffix == "db") continue; // p1_db is the shared default
        auto channel = parse_int(suffix);
        auto p1 = parse_double(value);
        if (!channel || !p1)
            throw ConfigError(r.where("channel_model", "p1_" + suffix) + ": bad override");
        if (!cfg.p1.count(static_cast<int>(*channel)))
            throw ConfigError(r.where("channel_model", "p1_" + suffix) +
                              ": channel is not in the deployment");
        cfg.p1[static_cast<int>(*channel)] = *p1;
    }

    if (r.raw("noise", "snr_db") && r.raw("noise", "sigma2"))
        throw ConfigError(r.where("noise", "snr_db") + ": give either snr_db or sigma2, not both");
    cfg.snr_db = r.get_double("noise", "snr_db", 30.0);
    cfg.sigma2 = r.get_double("noise", "sigma2", 0.0);
    if (r.raw("noise", "sigma2") && !(cfg.sigma2 > 0.0))
        throw ConfigError(r.where("noise", "sigma2") + ": must be > 0");
    cfg.k_samples = static_cast<int>(r.get_int("noise", "k_samples", 512));
    if (cfg.k_samples < 1) throw ConfigError(r.where("noise", "k_samples") + ": must be >= 1");
    cfg.quantization_step_db = r.get_double("noise", "quantization_step_db", 1.0);
    if (cfg.quantization_step_db < 0.0)
        throw ConfigError(r.where("noise", "quantization_step_db") + ": must be >= 0");

    cfg.frame_interval = r.get_double("schedule", "frame_interval", 0.005);
    if (!(cfg.frame_interval > 0.0))
        throw ConfigError(r.where("schedule", "frame_interval") + ": must be > 0");
    cfg.calibration_duration = r.get_double("schedule", "calibration_duration", 5.0);
    if (!(cfg.calibration_duration > 0.0))
        throw ConfigError(r.where("schedule", "calibration_duration") + ": must be > 0");
    cfg.duration = r.get_double("schedule", "duration", 60.0);
    if (!(cfg.duration > 0.0)) throw ConfigError(r.where("schedule", "duration") + ": must be > 0");

    const std::string object = r.get_string("object", "model", "point");
    if (object == "point") cfg.object_kind = ObjectKind::point;
    else if (object == "circle") cfg.object_kind = ObjectKind::circle;
    else throw ConfigError(r.where("object", "model") + ": expected 'point' or 'circle'");
    cfg.object_radius = r.get_double("object", "radius", 0.1575);
    if (cfg.object_kind == ObjectKind::circle && !(cfg.object_radius > 0.0))
        throw ConfigError(r.where("object", "radius") + ": must be > 0 for the circle model");

    const std::string traj = r.get_string("trajectory", "type", "absent");
    TrajectorySpec& t = cfg.trajectory;
    if (traj == "absent") t.kind = TrajectoryKind::absent;
    else if (traj == "standstill") t.kind = TrajectoryKind::standstill;
    else if (traj == "waypoints") t.kind = TrajectoryKind::waypoints;
    else if (traj == "random_walk") t.kind = TrajectoryKind::random_walk;
    else throw ConfigError(r.where("trajectory", "type") +
                           ": expected absent|standstill|waypoints|random_walk");
    t.speed = r.get_double("trajectory", "speed", 0.0);
    t.waypoints = r.get_points("trajectory", "waypoints");
    t.points = r.get_points("trajectory", "points");
    t.dwell = r.get_double("trajectory", "dwell", 0.0);
    t.wall_margin = r.get_double("trajectory", "wall_margin", 0.5);
    if (t.kind == TrajectoryKind::waypoints) {
        if (t.waypoints.size() < 2)
            throw ConfigError(r.where("trajectory", "waypoints") + ": need at least 2 waypoints");
        if (!(t.speed > 0.0))
            throw ConfigError(r.where("trajectory", "speed") + ": must be > 0 for waypoints");
    }
    if (t.kind == TrajectoryKind::standstill) {
        if (t.points.empty())
            throw ConfigError(r.where("trajectory", "points") + ": need at least 1 point");
        if (!(t.dwell > 0.0))
            throw ConfigError(r.where("trajectory", "dwell") + ": must be > 0 for standstill");
    }
    if (t.kind == TrajectoryKind::random_walk) {
        if (!(t.speed > 0.0))
            throw ConfigError(r.where("trajectory", "speed") + ": must be > 0 for random_walk");
        if (!(t.wall_margin >= 0.0))
            throw ConfigError(r.where("trajectory", "wall_margin") + ": must be >= 0");
    }

    cfg.delta_t = r.get_double("detector", "delta_t", 0.15625);
    if (!(cfg.delta_t > 0.0)) throw ConfigError(r.where("detector", "delta_t") + ": must be > 0");
    cfg.smoothing_window = static_cast<int>(r.get_int("detector", "smoothing_window", 0));
    if (cfg.smoothing_window < 0)
        throw ConfigError(r.where("detector", "smoothing_window") + ": must be >= 0");

    cfg.fade_threshold_db = r.get_double("classifier", "fade_threshold_db", -20.0);
    if (!(cfg.fade_threshold_db < 0.0))
        throw ConfigError(r.where("classifier", "fade_threshold_db") + ": must be negative");
    const std::string baseline = r.get_string("classifier", "baseline", "mean");
    if (baseline == "mean") cfg.baseline_mode = BaselineMode::mean;
    else if (baseline == "mode") cfg.baseline_mode = BaselineMode::histogram_mode;
    else if (baseline == "single_frame") cfg.baseline_mode = BaselineMode::single_frame;
    else throw ConfigError(r.where("classifier", "baseline") + ": expected mean|mode|single_frame");

    cfg.mode_threshold_scale = r.get_double("estimator", "a", 0.75);
    if (!(cfg.mode_threshold_scale > 0.0 && cfg.mode_threshold_scale < 1.0))
        throw ConfigError(r.where("estimator", "a") + ": must be in (0, 1)");

    const std::string scale = r.get_string("reconstruction", "scale_mode", "count");
    if (scale == "count") cfg.scale_mode = ScaleMode::pixel_count;
    else if (scale == "area") cfg.scale_mode = ScaleMode::ellipse_area;
    else throw ConfigError(r.where("reconstruction", "scale_mode") + ": expected 'count' or 'area'");
    cfg.partitions = static_cast<int>(r.get_int("reconstruction", "partitions", 1));
    if (cfg.partitions < 1)
        throw ConfigError(r.where("reconstruction", "partitions") + ": must be >= 1");

    for (const auto& [suffix, value] : r.prefixed("faults", "fade_link_")) {
        auto link = parse_uint(suffix);
        auto offset = parse_double(value);
        if (!link || !offset)
            throw ConfigError(r.where("faults", "fade_link_" + suffix) + ": bad entry");
        if (*link >= cfg.deployment.link_count())
            throw ConfigError(r.where("faults", "fade_link_" + suffix) + ": unknown link id");
        cfg.fade_injection_db[static_cast<int>(*link)] = *offset;
    }

    cfg.seed = r.get_uint("run", "seed", 1);
    cfg.snapshot_interval = r.get_double("run", "snapshot_interval", 0.0);
    if (cfg.snapshot_interval < 0.0)
        throw ConfigError(r.where("run", "snapshot_interval") + ": must be >= 0");

    cfg.report.significance = r.get_double("report", "significance", 0.05);
    if (!(cfg.report.significance > 0.0 && cfg.report.significance < 1.0))
        throw ConfigError(r.where("report", "significance") + ": must be in (0, 1)");
    cfg.report.fit_family = r.get_string("report", "fit_family", "best");
    if (cfg.report.fit_family != "best" && cfg.report.fit_family != "rayleigh" &&
        cfg.report.fit_family != "gamma" && cfg.report.fit_family != "lognormal")
        throw ConfigError(r.where("report", "fit_family") +
                          ": expected best|rayleigh|gamma|lognormal");
    if (const std::string* raw = r.raw("report", "comparisons")) {
        for (const std::string& item : split_list(*raw, ';')) {
            const auto colon = item.rfind(':');
            if (colon == std::string::npos)
                throw ConfigError(r.where("report", "comparisons") +
                                  ": expected 'label:mean' entries");
            auto mean = parse_double(item.substr(colon + 1));
            std::string label = item.substr(0, colon);
            while (!label.empty() && label.back() == ' ') label.pop_back();
            if (!mean || label.empty())
                throw ConfigError(r.where("report", "comparisons") + ": bad entry '" + item + "'");
            cfg.report.comparisons.emplace_back(label, *mean);
        }
    }

    return cfg;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::parameter_echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("nodes", std::to_string(deployment.node_count()));
    out.emplace_back("links", std::to_string(deployment.link_count()));
    out.emplace_back("pairs", std::to_string(deployment.pair_count()));
    std::string channels;
    for (int c : deployment.channels()) channels += (channels.empty() ? "" : " ") + std::to_string(c);
    out.emplace_back("channels", channels);
    out.emplace_back("grid", std::to_string(grid.rows) + " x " + std::to_string(grid.cols) + " @ " +
                                 format_double(grid.pixel_size) + " m");
    out.emplace_back("gamma", format_double(gamma));
    out.emplace_back("eta", format_double(eta));
    out.emplace_back("tx_power_dbm", format_double(p_s));
    out.emplace_back("d1", format_double(d_1));
    out.emplace_back("sigma2", format_double(noise_sigma2()));
    out.emplace_back("k_samples", std::to_string(k_samples));
    out.emplace_back("quantization_step_db", format_double(quantization_step_db));
    out.emplace_back("frame_interval", format_double(frame_interval));
    out.emplace_back("calibration_duration", format_double(calibration_duration));
    out.emplace_back("duration", format_double(duration));
    out.emplace_back("object", object_kind == ObjectKind::point
                                   ? std::string("point")
                                   : "circle r=" + format_double(object_radius));
    out.emplace_back("delta_t", format_double(delta_t));
    out.emplace_back("smoothing_window", std::to_string(smoothing_window));
    out.emplace_back("fade_threshold_db", format_double(fade_threshold_db));
    out.emplace_back("a", format_double(mode_threshold_scale));
    out.emplace_back("scale_mode", scale_mode == ScaleMode::pixel_count ? "count" : "area");
    out.emplace_back("partitions", std::to_string(partitions));
    out.emplace_back("seed", std::to_string(seed));
    return out;
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    KeyValueFile file = KeyValueFile::parse(in, path.filename().string());
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + item + "': expected KEY=VALUE");
        const auto [section, key] = resolve_config_key(item.substr(0, eq));
        file.set(section, key, item.substr(eq + 1));
    }
    return parse_scenario(file, path.filename().string());
}

std::vector<std::string> documented_keys() {
    std::vector<std::string> out;
    for (const SectionSchema& s : schema()) {
        for (const char* k : s.keys) out.push_back(std::string(s.name) + "." + k);
        for (const char* p : s.prefixes) out.push_back(std::string(s.name) + "." + p + "<id>");
    }
    return out;
}

std::pair<std::string, std::string> resolve_config_key(const std::string& name) {
    std::string section, key;
    if (const auto dot = name.find('.'); dot != std::string::npos) {
        section = name.substr(0, dot);
        key = name.substr(dot + 1);
        for (const SectionSchema& s : schema()) {
            if (section != s.name) continue;
            for (const char* k : s.keys)
                if (key == k) return {section, key};
            for (const char* p : s.prefixes)
                if (key.rfind(p, 0) == 0 && key.size() > std::string(p).size()) return {section, key};
        }
        throw ConfigError("unknown config key '" + name + "'");
    }
    std::vector<std::pair<std::string, std::string>> matches;
    auto add_match = [&matches](const std::string& s, const std::string& k) {
        for (const auto& m : matches)
            if (m.first == s && m.second == k) return;
        matches.emplace_back(s, k);
    };
    for (const SectionSchema& s : schema()) {
        for (const char* k : s.keys)
            if (name == k) add_match(s.name, k);
        for (const char* p : s.prefixes)
            if (name.rfind(p, 0) == 0 && name.size() > std::string(p).size())
                add_match(s.name, name);
    }
    if (matches.empty()) throw ConfigError("unknown config key '" + name + "'");
    if (matches.size() > 1) {
        std::string msg = "ambiguous config key '" + name + "' (matches";
        for (const auto& [s, k] : matches) msg += " " + s + "." + k;
        throw ConfigError(msg + ")");
    }
    return matches.front();
}

} // namespace rti
