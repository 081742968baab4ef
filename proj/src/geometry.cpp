#include "rti/geometry.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

#include "rti/errors.hpp"

namespace rti {

double ieee802154_frequency(int channel) {
    if (channel < 11 || channel > 26)
        throw ConfigError("channel " + std::to_string(channel) +
                          " has no default frequency (valid ids: 11..26); set it explicitly");
    return (2405.0 + 5.0 * (channel - 11)) * 1e6;
}

void Deployment::validate() {
    if (node_positions.empty())
        throw ConfigError("deployment has no nodes");
    if (links.empty())
        throw ConfigError("deployment has no links");

    for (std::size_t i = 0; i < node_positions.size(); ++i)
        for (std::size_t j = i + 1; j < node_positions.size(); ++j)
            if (node_positions[i] == node_positions[j])
                throw ConfigError("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                                  " have identical positions");

    link_pair_.assign(links.size(), -1);
    pair_nodes_.clear();
    pair_links_.clear();

    std::set<std::tuple<int, int, int>> seen;
    std::map<std::pair<int, int>, int> pair_id;
    const int m = static_cast<int>(node_positions.size());
    for (std::size_t l = 0; l < links.size(); ++l) {
        const Link& lk = links[l];
        if (lk.tx < 0 || lk.tx >= m || lk.rx < 0 || lk.rx >= m)
            throw ConfigError("link " + std::to_string(l) + " references an unknown node id");
        if (lk.tx == lk.rx)
            throw ConfigError("link " + std::to_string(l) + " has tx == rx");
        if (!seen.insert({lk.tx, lk.rx, lk.channel}).second)
            throw ConfigError("duplicate link (tx=" + std::to_string(lk.tx) + ", rx=" +
                              std::to_string(lk.rx) + ", channel=" + std::to_string(lk.channel) + ")");
        auto [it, fresh] = pair_id.try_emplace({lk.tx, lk.rx}, static_cast<int>(pair_nodes_.size()));
        if (fresh) {
            pair_nodes_.push_back({lk.tx, lk.rx});
            pair_links_.emplace_back();
        }
        link_pair_[l] = it->second;
        pair_links_[it->second].push_back(static_cast<int>(l));
    }

    for (int c : channels()) {
        auto it = channel_frequencies.find(c);
        if (it == channel_frequencies.end())
            channel_frequencies[c] = ieee802154_frequency(c);
        else if (!(it->second > 0.0))
            throw ConfigError("channel " + std::to_string(c) + " has non-positive frequency");
    }
    validated_ = true;
}

void Deployment::require_validated() const {
    if (!validated_)
        throw std::logic_error("Deployment::validate() has not been called");
}

std::size_t Deployment::pair_count() const {
    require_validated();
    return pair_nodes_.size();
}

Vec2 Deployment::tx_position(int link_id) const { return node_positions.at(links.at(link_id).tx); }
Vec2 Deployment::rx_position(int link_id) const { return node_positions.at(links.at(link_id).rx); }

double Deployment::link_length(int link_id) const {
    return (rx_position(link_id) - tx_position(link_id)).norm();
}

double Deployment::link_frequency(int link_id) const {
    return channel_frequencies.at(links.at(link_id).channel);
}

int Deployment::pair_of_link(int link_id) const {
    require_validated();
    return link_pair_.at(link_id);
}

const std::vector<int>& Deployment::links_of_pair(int pair_id) const {
    require_validated();
    return pair_links_.at(pair_id);
}

Vec2 Deployment::pair_tx(int pair_id) const {
    require_validated();
    return node_positions.at(pair_nodes_.at(pair_id).first);
}

Vec2 Deployment::pair_rx(int pair_id) const {
    require_validated();
    return node_positions.at(pair_nodes_.at(pair_id).second);
}

double Deployment::pair_length(int pair_id) const {
    return (pair_rx(pair_id) - pair_tx(pair_id)).norm();
}

std::vector<int> Deployment::channels() const {
    std::set<int> ids;
    for (const Link& l : links) ids.insert(l.channel);
    return {ids.begin(), ids.end()};
}

void Grid::validate() const {
    if (!(pixel_size > 0.0)) throw ConfigError("grid pixel_size must be > 0");
    if (rows <= 0 || cols <= 0) throw ConfigError("grid rows/cols must be positive");
}

double excess_path_length(Vec2 p, Vec2 p_t, Vec2 p_r) {
    const double d = (p_r - p_t).norm();
    if (d == 0.0) throw std::domain_error("excess_path_length: coincident endpoints");
    const double v = (p - p_r).norm() + (p - p_t).norm() - d;
    return v > 0.0 ? v : 0.0; // clamp fp residue on the segment
}

double ellipse_area(double d, double delta) {
    if (!(d > 0.0)) throw std::domain_error("ellipse_area: d must be > 0");
    if (delta < 0.0) throw std::domain_error("ellipse_area: delta must be >= 0");
    return 0.25 * std::numbers::pi * (d + delta) * std::sqrt(delta * (2.0 * d + delta));
}

double excess_path_rate(Vec2 p, Vec2 v, Vec2 p_t, Vec2 p_r) {
    const Vec2 from_r = p - p_r;
    const Vec2 from_t = p - p_t;
    const double nr = from_r.norm();
    const double nt = from_t.norm();
    if (nr == 0.0 || nt == 0.0)
        throw std::domain_error("excess_path_rate: derivative does not exist at a node position");
    const Vec2 dir{from_r.x / nr + from_t.x / nt, from_r.y / nr + from_t.y / nt};
    return dir.dot(v);
}

std::vector<double> pixel_excess_lengths(const Grid& grid, const Deployment& dep, int link_id) {
    grid.validate();
    const Vec2 tx = dep.tx_position(link_id);
    const Vec2 rx = dep.rx_position(link_id);
    std::vector<double> out(static_cast<std::size_t>(grid.pixel_count()));
    for (int n = 0; n < grid.pixel_count(); ++n)
        out[static_cast<std::size_t>(n)] = excess_path_length(grid.pixel_center(n), tx, rx);
    return out;
}

} // namespace rti
