#pragma once
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "rti/vec2.hpp"

namespace rti {

/// One directed measurement channel between two nodes.
struct Link {
    int tx = 0;
    int rx = 0;
    int channel = 0;
};

/// Default IEEE 802.15.4 2.4 GHz band mapping: f_c = 2405 + 5 (c - 11) MHz, c in 11..26.
double ieee802154_frequency(int channel);

/// Static network description: node coordinates, the (tx, rx, channel) link
/// table and the carrier frequency of each channel. Link ids are the dense
/// indices 0..L-1 into `links`. Links sharing the same (tx, rx) nodes form a
/// *pair*; pair ids are dense in order of first appearance in the link table.
/// Channel fusion and back-projection operate per pair, per-channel
/// observations and thresholds per link.
struct Deployment {
    std::vector<Vec2> node_positions;
    std::vector<Link> links;
    std::map<int, double> channel_frequencies; // channel id -> carrier (Hz)

    /// Checks invariants and builds the pair tables. Must be called before the
    /// pair accessors. Channels 11..26 without an explicit frequency get the
    /// IEEE 802.15.4 default; other channels must be given one.
    void validate();

    std::size_t node_count() const { return node_positions.size(); }
    std::size_t link_count() const { return links.size(); }
    std::size_t pair_count() const;

    Vec2 tx_position(int link_id) const;
    Vec2 rx_position(int link_id) const;
    double link_length(int link_id) const;
    double link_frequency(int link_id) const;

    int pair_of_link(int link_id) const;
    const std::vector<int>& links_of_pair(int pair_id) const;
    Vec2 pair_tx(int pair_id) const;
    Vec2 pair_rx(int pair_id) const;
    double pair_length(int pair_id) const;

    /// Sorted unique channel ids present in the link table.
    std::vector<int> channels() const;

private:
    void require_validated() const;

    bool validated_ = false;
    std::vector<int> link_pair_;
    std::vector<std::pair<int, int>> pair_nodes_;
    std::vector<std::vector<int>> pair_links_;
};

/// Row-major pixel grid. Pixel n = row * cols + col has its center at
/// origin + ((col + 0.5) dx, (row + 0.5) dx) with dx = pixel_size.
struct Grid {
    Vec2 origin;
    double pixel_size = 0.0;
    int rows = 0;
    int cols = 0;

    void validate() const;
    int pixel_count() const { return rows * cols; }
    int pixel_index(int row, int col) const { return row * cols + col; }
    Vec2 pixel_center(int n) const {
        const int row = n / cols;
        const int col = n % cols;
        return {origin.x + (col + 0.5) * pixel_size, origin.y + (row + 0.5) * pixel_size};
    }
};

/// Excess path length of a reflection at p for the node pair (p_t, p_r):
/// |p - p_r| + |p - p_t| - |p_r - p_t|. Nonnegative; zero exactly on the
/// closed segment between the nodes.
double excess_path_length(Vec2 p, Vec2 p_t, Vec2 p_r);

/// Area of the ellipse with foci separated by d through the point with excess
/// path length delta: (pi/4) (d + delta) sqrt(2 d delta + delta^2).
double ellipse_area(double d, double delta);

/// Time derivative of the excess path length for a point moving with velocity
/// v: [unit(p - p_r) + unit(p - p_t)]^T v. Undefined at the node positions.
double excess_path_rate(Vec2 p, Vec2 v, Vec2 p_t, Vec2 p_r);

/// Excess path length of every pixel center for one link.
std::vector<double> pixel_excess_lengths(const Grid& grid, const Deployment& dep, int link_id);

} // namespace rti
