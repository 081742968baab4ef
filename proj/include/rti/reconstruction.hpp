#pragma once
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rti/geometry.hpp"

namespace rti {

struct LinkSegment {
    Vec2 tx;
    Vec2 rx;
};

/// Sparse binary coverage matrix, one column per link: column l holds the
/// ascending pixel indices whose excess path length is <= delta_t.
struct IndicatorMatrix {
    int pixel_count = 0;
    std::vector<std::vector<int>> columns;
    std::size_t link_count() const { return columns.size(); }
};

IndicatorMatrix build_indicator(const Grid& grid, std::span<const LinkSegment> segments,
                                double delta_t);
/// One column per tx-rx pair, pair-id order.
IndicatorMatrix build_indicator(const Grid& grid, const Deployment& dep, double delta_t);

/// How the per-link scale is formed: the analytic ellipse area, or the covered
/// pixel count, which needs only the binary indicator.
enum class ScaleMode { ellipse_area, pixel_count };

/// Sparse nonnegative weight matrix with the indicator's sparsity pattern.
/// For every pixel covered by at least one link the weights across links sum
/// to one.
struct WeightMatrix {
    int pixel_count = 0;
    std::vector<std::vector<std::pair<int, double>>> columns; // (pixel, weight), ascending pixel
    std::size_t link_count() const { return columns.size(); }
};

/// Weight of link l at pixel n: s_l / sum over links covering n of s_l', with
/// s_l = 1/A(d_l, delta_t) in ellipse_area mode and s_l = 1/|column l| in
/// pixel_count mode. link_lengths and delta_t are only read in area mode.
WeightMatrix build_weights(const IndicatorMatrix& indicator, ScaleMode mode,
                           std::span<const double> link_lengths = {}, double delta_t = 0.0);

/// Floating-point instruction counters for the per-frame hot path.
struct OpCounters {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
};

struct OccupancyField {
    Grid grid;
    std::vector<double> values; // one per pixel, each in [0, 1]
};

/// Back-projected occupancy: the sum of the weight columns of links that are
/// usable and detecting, accumulated in ascending link id then ascending pixel
/// order. The accumulation performs additions only.
OccupancyField occupancy_field(const WeightMatrix& weights, const Grid& grid,
                               std::span<const std::uint8_t> usable,
                               std::span<const std::uint8_t> detections,
                               OpCounters* counters = nullptr);

/// Rectangular block of pixels: rows [row0, row0+rows) x cols [col0, col0+cols).
struct PixelRect {
    int row0 = 0;
    int col0 = 0;
    int rows = 0;
    int cols = 0;
};

/// Disjoint rectangular decomposition of the grid with the weight columns
/// sliced per region. Evaluating the field region by region skips regions
/// with no detecting link and reproduces the unpartitioned field bit for bit.
class RegionPartition {
public:
    RegionPartition(const Grid& grid, std::span<const PixelRect> regions,
                    const WeightMatrix& weights);

    /// Tile the grid into region_rows x region_cols equal rectangles.
    static std::vector<PixelRect> tile(const Grid& grid, int region_rows, int region_cols);

    std::size_t region_count() const { return regions_.size(); }

    OccupancyField field(const Grid& grid, std::span<const std::uint8_t> usable,
                         std::span<const std::uint8_t> detections, OpCounters* counters = nullptr,
                         std::vector<std::uint64_t>* per_region_additions = nullptr) const;

private:
    int pixel_count_ = 0;
    std::size_t link_count_ = 0;
    std::vector<PixelRect> regions_;
    // region -> (link id, weight entries inside the region)
    std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>> region_links_;
};

/// Split the grid into r near-square rectangles (r must tile the grid evenly).
RegionPartition partition_regions(const Grid& grid, int r, const WeightMatrix& weights);

/// "row,col,value" CSV, ascending pixel index.
void write_field_csv(const OccupancyField& field, std::ostream& out);
/// 8-bit binary PGM, value = round(255 * occupancy), top image row = highest
/// grid row so +y points up.
void write_field_pgm(const OccupancyField& field, std::ostream& out);

} // namespace rti
