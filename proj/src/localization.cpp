#include "rti/localization.hpp"

#include <algorithm>
#include <stdexcept>

namespace rti {

std::optional<MaskedField> threshold_field(const OccupancyField& field, double a) {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("threshold_field: a must be in (0, 1)");
    if (field.values.empty())
        throw std::invalid_argument("threshold_field: empty field");
    const double peak = *std::max_element(field.values.begin(), field.values.end());
    if (!(peak > 0.0)) return std::nullopt;

    MaskedField masked;
    masked.peak = peak;
    masked.values.assign(field.values.size(), 0.0);
    const double cut = a * peak;
    for (std::size_t n = 0; n < field.values.size(); ++n) {
        if (field.values[n] >= cut) {
            masked.values[n] = field.values[n];
            ++masked.support;
        }
    }
    return masked;
}

namespace {

bool support_connected(const MaskedField& masked, const Grid& grid) {
    if (masked.support <= 1) return true;
    std::vector<std::uint8_t> seen(masked.values.size(), 0);
    std::vector<int> stack;
    int first = -1;
    for (std::size_t n = 0; n < masked.values.size(); ++n)
        if (masked.values[n] > 0.0) { first = static_cast<int>(n); break; }
    stack.push_back(first);
    seen[static_cast<std::size_t>(first)] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        ++reached;
        const int row = n / grid.cols, col = n % grid.cols;
        const int neighbors[4][2] = {{row - 1, col}, {row + 1, col}, {row, col - 1}, {row, col + 1}};
        for (const auto& [r, c] : neighbors) {
            if (r < 0 || r >= grid.rows || c < 0 || c >= grid.cols) continue;
            const int m = grid.pixel_index(r, c);
            if (!seen[static_cast<std::size_t>(m)] && masked.values[static_cast<std::size_t>(m)] > 0.0) {
                seen[static_cast<std::size_t>(m)] = 1;
                stack.push_back(m);
            }
        }
    }
    return reached == masked.support;
}

} // namespace

PositionEstimate estimate_position(const MaskedField& masked, const Grid& grid) {
    if (static_cast<int>(masked.values.size()) != grid.pixel_count())
        throw std::invalid_argument("estimate_position: field does not match the grid");
    double total = 0.0;
    Vec2 weighted{0.0, 0.0};
    for (std::size_t n = 0; n < masked.values.size(); ++n) {
        const double v = masked.values[n];
        if (v <= 0.0) continue;
        total += v;
        weighted += grid.pixel_center(static_cast<int>(n)) * v;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("estimate_position: no occupancy detected");

    PositionEstimate est;
    est.position = weighted * (1.0 / total);
    est.peak = masked.peak;
    est.support_pixels = masked.support;
    est.disconnected = !support_connected(masked, grid);
    return est;
}

double distance_error(Vec2 estimate, Vec2 truth) {
    return (estimate - truth).norm();
}

} // namespace rti
