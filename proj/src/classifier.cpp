#include "rti/classifier.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

#include "rti/channel.hpp"
#include "rti/errors.hpp"
#include "rti/keyval.hpp"

namespace rti {

double fade_level(double p0_estimate, double predicted) {
    return p0_estimate - predicted;
}

bool link_usable(double fade, double p_d) {
    if (!(p_d < 0.0)) throw std::domain_error("link_usable: fade threshold must be negative");
    return fade > p_d;
}

bool channel_majority_usable(std::span<const std::uint8_t> channel_usable) {
    if (channel_usable.empty())
        throw std::invalid_argument("channel_majority_usable: empty input");
    std::size_t blacklisted = 0;
    for (std::uint8_t u : channel_usable) blacklisted += u ? 0 : 1;
    return !(2 * blacklisted > channel_usable.size());
}

PathLossFit fit_path_loss(const CalibrationSet& cal) {
    if (cal.entries.empty()) throw std::invalid_argument("fit_path_loss: empty calibration set");
    if (!(cal.d_1 > 0.0)) throw std::domain_error("fit_path_loss: reference distance must be > 0");

    std::set<int> channel_set;
    std::set<double> distance_set;
    for (const CalibrationEntry& e : cal.entries) {
        if (!(e.distance > 0.0))
            throw std::domain_error("fit_path_loss: link distances must be > 0");
        if (!std::isfinite(e.p0_hat))
            throw std::domain_error("fit_path_loss: non-finite power estimate");
        channel_set.insert(e.channel);
        distance_set.insert(e.distance);
    }
    if (distance_set.size() < 2)
        throw NumericalError("fit_path_loss: all link distances equal, eta is unidentifiable");

    std::map<int, int> channel_index;
    for (int c : channel_set) channel_index.emplace(c, static_cast<int>(channel_index.size()));
    const int c_count = static_cast<int>(channel_index.size());
    const int n = static_cast<int>(cal.entries.size());

    // p_s - p0 = p1(channel) + eta * 10 log10(d / d_1)
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, c_count + 1);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const CalibrationEntry& e = cal.entries[static_cast<std::size_t>(i)];
        design(i, channel_index.at(e.channel)) = 1.0;
        design(i, c_count) = 10.0 * std::log10(e.distance / cal.d_1);
        rhs(i) = cal.p_s - e.p0_hat;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < c_count + 1)
        throw NumericalError("fit_path_loss: rank-deficient design matrix");
    Eigen::VectorXd beta = qr.solve(rhs);

    PathLossFit fit;
    fit.eta = beta(c_count);
    for (const auto& [channel, idx] : channel_index) fit.p1[channel] = beta(idx);
    return fit;
}

CalibrationResult classify_deployment(const Deployment& dep, std::span<const double> baseline_db,
                                      double p_s, double d_1, double p_d) {
    if (baseline_db.size() != dep.link_count())
        throw std::invalid_argument("classify_deployment: baseline size != link count");

    CalibrationSet cal{p_s, d_1, {}};
    cal.entries.reserve(dep.link_count());
    for (std::size_t l = 0; l < dep.link_count(); ++l)
        cal.entries.push_back({static_cast<int>(l), dep.links[l].channel,
                               dep.link_length(static_cast<int>(l)), baseline_db[l]});

    CalibrationResult result;
    result.p_s = p_s;
    result.d_1 = d_1;
    result.fade_threshold_db = p_d;
    result.baseline_db.assign(baseline_db.begin(), baseline_db.end());

    PathLossFit fit = fit_path_loss(cal);
    result.eta_hat = fit.eta;
    result.p1_hat = fit.p1;

    result.fade_db.resize(dep.link_count());
    result.link_usable.resize(dep.link_count());
    for (std::size_t l = 0; l < dep.link_count(); ++l) {
        const PathLossParams params{p_s, fit.p1.at(dep.links[l].channel), d_1, fit.eta};
        const double predicted = los_power(params, dep.link_length(static_cast<int>(l)));
        result.fade_db[l] = fade_level(baseline_db[l], predicted);
        result.link_usable[l] = link_usable(result.fade_db[l], p_d) ? 1 : 0;
    }

    result.pair_usable.resize(dep.pair_count());
    std::vector<std::uint8_t> flags;
    for (std::size_t p = 0; p < dep.pair_count(); ++p) {
        flags.clear();
        for (int l : dep.links_of_pair(static_cast<int>(p)))
            flags.push_back(result.link_usable[static_cast<std::size_t>(l)]);
        result.pair_usable[p] = channel_majority_usable(flags) ? 1 : 0;
    }
    return result;
}

void save_calibration(std::ostream& out, const CalibrationResult& cal) {
    KeyValueFile file;
    file.set("fit", "eta", format_double(cal.eta_hat));
    file.set("fit", "p_s", format_double(cal.p_s));
    file.set("fit", "d_1", format_double(cal.d_1));
    file.set("fit", "fade_threshold_db", format_double(cal.fade_threshold_db));
    for (const auto& [channel, p1] : cal.p1_hat)
        file.set("p1", std::to_string(channel), format_double(p1));
    for (std::size_t l = 0; l < cal.baseline_db.size(); ++l)
        file.set("baseline", std::to_string(l), format_double(cal.baseline_db[l]));
    for (std::size_t l = 0; l < cal.fade_db.size(); ++l)
        file.set("fade", std::to_string(l), format_double(cal.fade_db[l]));
    for (std::size_t l = 0; l < cal.link_usable.size(); ++l)
        file.set("link_usable", std::to_string(l), cal.link_usable[l] ? "1" : "0");
    for (std::size_t p = 0; p < cal.pair_usable.size(); ++p)
        file.set("pair_usable", std::to_string(p), cal.pair_usable[p] ? "1" : "0");
    file.write(out);
}

namespace {

double require_double(const KeyValueFile& f, const std::string& source, const std::string& section,
                      const std::string& key) {
    const std::string* raw = f.find(section, key);
    if (!raw) throw ConfigError(source + ": missing [" + section + "] " + key);
    auto v = parse_double(*raw);
    if (!v) throw ConfigError(source + ": [" + section + "] " + key + ": bad number '" + *raw + "'");
    return *v;
}

std::vector<double> indexed_doubles(const KeyValueFile& f, const std::string& source,
                                    const std::string& section, std::size_t count) {
    std::vector<double> out(count);
    std::vector<bool> seen(count, false);
    const KeyValueFile::Section* s = f.find_section(section);
    if (!s) throw ConfigError(source + ": missing section [" + section + "]");
    for (const auto& [k, v] : s->entries) {
        auto idx = parse_uint(k);
        if (!idx || *idx >= count)
            throw ConfigError(source + ": [" + section + "] unknown index '" + k + "'");
        auto value = parse_double(v);
        if (!value) throw ConfigError(source + ": [" + section + "] " + k + ": bad number '" + v + "'");
        out[static_cast<std::size_t>(*idx)] = *value;
        seen[static_cast<std::size_t>(*idx)] = true;
    }
    for (std::size_t i = 0; i < count; ++i)
        if (!seen[i]) throw ConfigError(source + ": [" + section + "] missing index " + std::to_string(i));
    return out;
}

} // namespace

CalibrationResult load_calibration(std::istream& in, const std::string& source_name,
                                   const Deployment& dep) {
    KeyValueFile file = KeyValueFile::parse(in, source_name);
    CalibrationResult cal;
    cal.eta_hat = require_double(file, source_name, "fit", "eta");
    cal.p_s = require_double(file, source_name, "fit", "p_s");
    cal.d_1 = require_double(file, source_name, "fit", "d_1");
    cal.fade_threshold_db = require_double(file, source_name, "fit", "fade_threshold_db");

    const KeyValueFile::Section* p1 = file.find_section("p1");
    if (!p1) throw ConfigError(source_name + ": missing section [p1]");
    for (const auto& [k, v] : p1->entries) {
        auto channel = parse_int(k);
        auto value = parse_double(v);
        if (!channel || !value)
            throw ConfigError(source_name + ": [p1] bad entry '" + k + " = " + v + "'");
        cal.p1_hat[static_cast<int>(*channel)] = *value;
    }
    for (int c : dep.channels())
        if (!cal.p1_hat.count(c))
            throw ConfigError(source_name + ": [p1] missing channel " + std::to_string(c));

    cal.baseline_db = indexed_doubles(file, source_name, "baseline", dep.link_count());
    cal.fade_db = indexed_doubles(file, source_name, "fade", dep.link_count());
    const std::vector<double> lu = indexed_doubles(file, source_name, "link_usable", dep.link_count());
    const std::vector<double> pu = indexed_doubles(file, source_name, "pair_usable", dep.pair_count());
    cal.link_usable.assign(lu.begin(), lu.end());
    cal.pair_usable.assign(pu.begin(), pu.end());
    for (std::size_t l = 0; l < lu.size(); ++l)
        cal.link_usable[l] = lu[l] != 0.0 ? 1 : 0;
    for (std::size_t p = 0; p < pu.size(); ++p)
        cal.pair_usable[p] = pu[p] != 0.0 ? 1 : 0;
    return cal;
}

} // namespace rti
