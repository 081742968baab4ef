#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "rti/geometry.hpp"

namespace rti {

/// Detection threshold of a link: |lower envelope| at the maximum excess path
/// length delta_t, evaluated with the link's length and the site (gamma, eta).
/// Equals max(|upper|, |lower|) since the lower envelope dominates; does not
/// depend on the carrier frequency.
double compute_threshold(double link_d, double gamma, double eta, double delta_t);

/// Binary hypothesis decision: presence (true) iff |z| > threshold.
/// Equality decides absence.
bool decide(double z, double threshold);

/// Strict majority of ones. Ties on even counts resolve to false.
bool majority_vote(std::span<const std::uint8_t> decisions);

/// Per-pair thresholds in pair-id order, all sharing delta_t.
struct DetectorConfig {
    double delta_t = 0.0;
    std::vector<double> thresholds; // dB, one per tx-rx pair
};

DetectorConfig make_detector_config(const Deployment& dep, double gamma, double eta, double delta_t);

/// Pack one bit per entry, link-id order, little-endian within each byte.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

} // namespace rti
