#pragma once
#include <optional>

#include "rti/reconstruction.hpp"

namespace rti {

/// Occupancy field restricted to its mode region: entries below a * peak are
/// zeroed. peak is the field maximum, support the retained pixel count.
struct MaskedField {
    std::vector<double> values;
    double peak = 0.0;
    int support = 0;
};

/// Mode-region extraction with relative threshold a in (0, 1). Returns nullopt
/// when the field is identically zero (no occupancy detected) -- callers must
/// not fabricate a position in that case.
std::optional<MaskedField> threshold_field(const OccupancyField& field, double a);

struct PositionEstimate {
    Vec2 position;
    double peak = 0.0;
    int support_pixels = 0;
    /// The supra-threshold support splits into several 4-connected components.
    bool disconnected = false;
};

/// Occupancy-weighted centroid of the mode region.
PositionEstimate estimate_position(const MaskedField& masked, const Grid& grid);

/// Euclidean distance between estimate and truth.
double distance_error(Vec2 estimate, Vec2 truth);

} // namespace rti
