#include "rti/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rti/errors.hpp"
#include "rti/keyval.hpp"

namespace rti {

IndicatorMatrix build_indicator(const Grid& grid, std::span<const LinkSegment> segments,
                                double delta_t) {
    grid.validate();
    if (!(delta_t > 0.0)) throw std::domain_error("build_indicator: delta_t must be > 0");
    IndicatorMatrix ind;
    ind.pixel_count = grid.pixel_count();
    ind.columns.resize(segments.size());
    for (std::size_t l = 0; l < segments.size(); ++l) {
        for (int n = 0; n < grid.pixel_count(); ++n)
            if (excess_path_length(grid.pixel_center(n), segments[l].tx, segments[l].rx) <= delta_t)
                ind.columns[l].push_back(n);
    }
    return ind;
}

IndicatorMatrix build_indicator(const Grid& grid, const Deployment& dep, double delta_t) {
    std::vector<LinkSegment> segments;
    segments.reserve(dep.pair_count());
    for (std::size_t p = 0; p < dep.pair_count(); ++p)
        segments.push_back({dep.pair_tx(static_cast<int>(p)), dep.pair_rx(static_cast<int>(p))});
    return build_indicator(grid, segments, delta_t);
}

WeightMatrix build_weights(const IndicatorMatrix& indicator, ScaleMode mode,
                           std::span<const double> link_lengths, double delta_t) {
    const std::size_t link_count = indicator.link_count();
    std::vector<double> inv_scale(link_count, 0.0);
    if (mode == ScaleMode::ellipse_area) {
        if (link_lengths.size() != link_count)
            throw std::invalid_argument("build_weights: area mode needs one length per link");
        for (std::size_t l = 0; l < link_count; ++l)
            inv_scale[l] = 1.0 / ellipse_area(link_lengths[l], delta_t);
    } else {
        for (std::size_t l = 0; l < link_count; ++l)
            if (!indicator.columns[l].empty())
                inv_scale[l] = 1.0 / static_cast<double>(indicator.columns[l].size());
    }

    // Per-pixel normalizer: sum of the scales of the links covering it.
    std::vector<double> norm(static_cast<std::size_t>(indicator.pixel_count), 0.0);
    for (std::size_t l = 0; l < link_count; ++l)
        for (int n : indicator.columns[l]) norm[static_cast<std::size_t>(n)] += inv_scale[l];

    WeightMatrix weights;
    weights.pixel_count = indicator.pixel_count;
    weights.columns.resize(link_count);
    for (std::size_t l = 0; l < link_count; ++l) {
        weights.columns[l].reserve(indicator.columns[l].size());
        for (int n : indicator.columns[l])
            weights.columns[l].emplace_back(n, inv_scale[l] / norm[static_cast<std::size_t>(n)]);
    }
    return weights;
}

OccupancyField occupancy_field(const WeightMatrix& weights, const Grid& grid,
                               std::span<const std::uint8_t> usable,
                               std::span<const std::uint8_t> detections, OpCounters* counters) {
    if (usable.size() != weights.link_count() || detections.size() != weights.link_count())
        throw std::invalid_argument("occupancy_field: flag vectors must have one entry per link");
    if (grid.pixel_count() != weights.pixel_count)
        throw std::invalid_argument("occupancy_field: grid does not match the weight matrix");

    OccupancyField field{grid, std::vector<double>(static_cast<std::size_t>(weights.pixel_count), 0.0)};
    std::uint64_t additions = 0;
    for (std::size_t l = 0; l < weights.link_count(); ++l) {
        if (!(usable[l] && detections[l])) continue;
        for (const auto& [n, w] : weights.columns[l]) {
            field.values[static_cast<std::size_t>(n)] += w;
            ++additions;
        }
    }
    if (counters) counters->additions += additions;
    return field;
}

RegionPartition::RegionPartition(const Grid& grid, std::span<const PixelRect> regions,
                                 const WeightMatrix& weights) {
    grid.validate();
    if (regions.empty()) throw ConfigError("partition: at least one region required");
    if (grid.pixel_count() != weights.pixel_count)
        throw std::invalid_argument("partition: grid does not match the weight matrix");

    pixel_count_ = grid.pixel_count();
    link_count_ = weights.link_count();
    regions_.assign(regions.begin(), regions.end());

    std::vector<int> region_of_pixel(static_cast<std::size_t>(pixel_count_), -1);
    for (std::size_t r = 0; r < regions_.size(); ++r) {
        const PixelRect& rect = regions_[r];
        if (rect.rows <= 0 || rect.cols <= 0 || rect.row0 < 0 || rect.col0 < 0 ||
            rect.row0 + rect.rows > grid.rows || rect.col0 + rect.cols > grid.cols)
            throw ConfigError("partition: region " + std::to_string(r) + " exceeds the grid");
        for (int row = rect.row0; row < rect.row0 + rect.rows; ++row) {
            for (int col = rect.col0; col < rect.col0 + rect.cols; ++col) {
                int& slot = region_of_pixel[static_cast<std::size_t>(grid.pixel_index(row, col))];
                if (slot != -1)
                    throw ConfigError("partition: regions overlap at pixel (" +
                                      std::to_string(row) + ", " + std::to_string(col) + ")");
                slot = static_cast<int>(r);
            }
        }
    }
    for (int n = 0; n < pixel_count_; ++n)
        if (region_of_pixel[static_cast<std::size_t>(n)] == -1)
            throw ConfigError("partition: regions do not cover pixel " + std::to_string(n));

    region_links_.resize(regions_.size());
    std::vector<std::vector<std::pair<int, double>>> slices(regions_.size());
    for (std::size_t l = 0; l < weights.link_count(); ++l) {
        for (auto& s : slices) s.clear();
        for (const auto& [n, w] : weights.columns[l])
            slices[static_cast<std::size_t>(region_of_pixel[static_cast<std::size_t>(n)])]
                .emplace_back(n, w);
        for (std::size_t r = 0; r < regions_.size(); ++r)
            if (!slices[r].empty())
                region_links_[r].emplace_back(static_cast<int>(l), slices[r]);
    }
}

std::vector<PixelRect> RegionPartition::tile(const Grid& grid, int region_rows, int region_cols) {
    grid.validate();
    if (region_rows <= 0 || region_cols <= 0 || grid.rows % region_rows != 0 ||
        grid.cols % region_cols != 0)
        throw ConfigError("partition: grid is not divisible into " + std::to_string(region_rows) +
                          " x " + std::to_string(region_cols) + " rectangles");
    const int block_rows = grid.rows / region_rows;
    const int block_cols = grid.cols / region_cols;
    std::vector<PixelRect> rects;
    rects.reserve(static_cast<std::size_t>(region_rows) * region_cols);
    for (int r = 0; r < region_rows; ++r)
        for (int c = 0; c < region_cols; ++c)
            rects.push_back({r * block_rows, c * block_cols, block_rows, block_cols});
    return rects;
}

OccupancyField RegionPartition::field(const Grid& grid, std::span<const std::uint8_t> usable,
                                      std::span<const std::uint8_t> detections, OpCounters* counters,
                                      std::vector<std::uint64_t>* per_region_additions) const {
    if (usable.size() != link_count_ || detections.size() != link_count_)
        throw std::invalid_argument("partition field: flag vectors must have one entry per link");
    if (grid.pixel_count() != pixel_count_)
        throw std::invalid_argument("partition field: grid does not match the partition");

    OccupancyField out{grid, std::vector<double>(static_cast<std::size_t>(pixel_count_), 0.0)};
    if (per_region_additions) per_region_additions->assign(regions_.size(), 0);
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < regions_.size(); ++r) {
        std::uint64_t additions = 0;
        for (const auto& [l, entries] : region_links_[r]) {
            if (!(usable[static_cast<std::size_t>(l)] && detections[static_cast<std::size_t>(l)]))
                continue;
            for (const auto& [n, w] : entries) {
                out.values[static_cast<std::size_t>(n)] += w;
                ++additions;
            }
        }
        if (per_region_additions) (*per_region_additions)[r] = additions;
        total += additions;
    }
    if (counters) counters->additions += total;
    return out;
}

RegionPartition partition_regions(const Grid& grid, int r, const WeightMatrix& weights) {
    grid.validate();
    if (r < 1) throw ConfigError("partition: region count must be >= 1");
    // Prefer the near-square factorization that tiles the grid evenly.
    int best_a = -1, best_b = -1;
    for (int a = static_cast<int>(std::sqrt(static_cast<double>(r))); a >= 1; --a) {
        if (r % a != 0) continue;
        const int b = r / a;
        if (grid.rows % a == 0 && grid.cols % b == 0) { best_a = a; best_b = b; break; }
        if (grid.rows % b == 0 && grid.cols % a == 0) { best_a = b; best_b = a; break; }
    }
    if (best_a < 0)
        throw ConfigError("partition: grid (" + std::to_string(grid.rows) + " x " +
                          std::to_string(grid.cols) + ") is not divisible into " +
                          std::to_string(r) + " rectangles");
    const std::vector<PixelRect> rects = RegionPartition::tile(grid, best_a, best_b);
    return RegionPartition(grid, rects, weights);
}

void write_field_csv(const OccupancyField& field, std::ostream& out) {
    out << "row,col,value\n";
    for (int n = 0; n < field.grid.pixel_count(); ++n)
        out << n / field.grid.cols << ',' << n % field.grid.cols << ','
            << format_double(field.values[static_cast<std::size_t>(n)]) << '\n';
}

void write_field_pgm(const OccupancyField& field, std::ostream& out) {
    out << "P5\n" << field.grid.cols << ' ' << field.grid.rows << "\n255\n";
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(field.grid.pixel_count()));
    for (int row = field.grid.rows - 1; row >= 0; --row) {
        for (int col = 0; col < field.grid.cols; ++col) {
            const double v = field.values[static_cast<std::size_t>(field.grid.pixel_index(row, col))];
            const long byte = std::lround(255.0 * std::clamp(v, 0.0, 1.0));
            bytes.push_back(static_cast<char>(static_cast<unsigned char>(byte)));
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace rti
