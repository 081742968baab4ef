#include "rti/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rti {

namespace {

void check_params(const ReflectionParams& p, bool need_fc) {
    if (!(p.gamma >= 0.0 && p.gamma < 1.0))
        throw std::domain_error("reflection coefficient must satisfy 0 <= gamma < 1");
    if (!(p.eta > 0.0)) throw std::domain_error("path-loss exponent must be > 0");
    if (!(p.d > 0.0)) throw std::domain_error("link length must be > 0");
    if (need_fc && !(p.f_c > 0.0)) throw std::domain_error("carrier frequency must be > 0");
}

} // namespace

double zeta(double delta, const ReflectionParams& p) {
    check_params(p, true);
    if (delta < 0.0) throw std::domain_error("zeta: delta must be >= 0");
    const double u = std::pow(1.0 + delta / p.d, 0.5 * p.eta); // (1 + delta/d)^(eta/2)
    const double phi = 2.0 * std::numbers::pi * delta * p.f_c / speed_of_light;
    const double power_term = 1.0 + p.gamma * p.gamma / (u * u);
    const double phase_term = 1.0 - 2.0 * p.gamma * u / (p.gamma * p.gamma + u * u) * std::cos(phi);
    return 10.0 * std::log10(power_term) + 10.0 * std::log10(phase_term);
}

Envelopes envelope_pair(double delta, const ReflectionParams& p) {
    check_params(p, false);
    if (delta < 0.0) throw std::domain_error("envelope_pair: delta must be >= 0");
    const double ratio = p.gamma / std::pow(1.0 + delta / p.d, 0.5 * p.eta);
    const double lower_arg = 1.0 - ratio;
    if (!(lower_arg > 0.0))
        throw std::domain_error("envelope_pair: lower envelope argument is not positive");
    return {20.0 * std::log10(1.0 + ratio), 20.0 * std::log10(lower_arg)};
}

Envelopes envelope_linearized(double delta, const ReflectionParams& p) {
    check_params(p, false);
    const double scale = 20.0 / std::numbers::ln10;
    const double slope = 0.5 * p.eta * (p.gamma / (p.gamma + 1.0)) * (delta / p.d);
    return {scale * (std::log1p(p.gamma) - slope), scale * (std::log1p(-p.gamma) + slope)};
}

double los_power(const PathLossParams& p, double d) {
    if (!(d > 0.0)) throw std::domain_error("los_power: distance must be > 0");
    if (!(p.d_1 > 0.0)) throw std::domain_error("los_power: reference distance must be > 0");
    return p.p_s - p.p_1 - 10.0 * p.eta * std::log10(d / p.d_1);
}

} // namespace rti
