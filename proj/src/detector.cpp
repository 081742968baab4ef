#include "rti/detector.hpp"

#include <cmath>
#include <stdexcept>

#include "rti/channel.hpp"

namespace rti {

double compute_threshold(double link_d, double gamma, double eta, double delta_t) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("compute_threshold: gamma must be in (0, 1)");
    if (!(delta_t > 0.0)) throw std::domain_error("compute_threshold: delta_t must be > 0");
    const Envelopes env = envelope_pair(delta_t, {gamma, eta, link_d, 2.4425e9});
    return std::abs(env.lower);
}

bool decide(double z, double threshold) {
    if (threshold < 0.0) throw std::domain_error("decide: threshold must be >= 0");
    return std::abs(z) > threshold;
}

bool majority_vote(std::span<const std::uint8_t> decisions) {
    if (decisions.empty()) throw std::invalid_argument("majority_vote: empty input");
    std::size_t ones = 0;
    for (std::uint8_t d : decisions) ones += d ? 1 : 0;
    return 2 * ones > decisions.size();
}

DetectorConfig make_detector_config(const Deployment& dep, double gamma, double eta, double delta_t) {
    DetectorConfig cfg;
    cfg.delta_t = delta_t;
    cfg.thresholds.reserve(dep.pair_count());
    for (std::size_t p = 0; p < dep.pair_count(); ++p)
        cfg.thresholds.push_back(compute_threshold(dep.pair_length(static_cast<int>(p)), gamma, eta, delta_t));
    return cfg;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
    if (bytes.size() * 8 < bit_count)
        throw std::invalid_argument("unpack_bits: byte buffer too short");
    std::vector<std::uint8_t> out(bit_count, 0);
    for (std::size_t i = 0; i < bit_count; ++i)
        out[i] = (bytes[i >> 3] >> (i & 7)) & 1u;
    return out;
}

} // namespace rti
