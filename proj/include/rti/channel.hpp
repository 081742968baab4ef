#pragma once

namespace rti {

inline constexpr double speed_of_light = 299'792'458.0; // m/s

inline double wavelength(double f_c) { return speed_of_light / f_c; }

/// Parameters of the single-bounce reflection response of one link.
/// gamma is the scalar reflection coefficient (0 <= gamma < 1), eta the
/// path-loss exponent, d the link length (m), f_c the carrier (Hz).
struct ReflectionParams {
    double gamma = 0.0;
    double eta = 2.0;
    double d = 1.0;
    double f_c = 2.4425e9;
};

/// Log-distance path-loss model parameters. p_s is the transmit power (dBm),
/// p_1 the reference loss (dB) at distance d_1 (m).
struct PathLossParams {
    double p_s = 0.0;
    double p_1 = 40.0;
    double d_1 = 1.0;
    double eta = 2.0;
};

/// RSS perturbation (dB) caused by a reflection with excess path length delta:
///   10 log10(1 + gamma^2 / u^2) + 10 log10(1 - 2 gamma u / (gamma^2 + u^2) cos(phi))
/// with u = (1 + delta/d)^(eta/2) and phi = 2 pi delta f_c / c0.
/// Negative at destructive phase (cos phi = 1), positive at constructive.
double zeta(double delta, const ReflectionParams& p);

struct Envelopes {
    double upper = 0.0; // dB, >= 0
    double lower = 0.0; // dB, <= 0
};

/// Exact envelopes of zeta over the carrier phase:
///   upper = 20 log10(1 + gamma / u), lower = 20 log10(1 - gamma / u).
/// Frequency-independent.
Envelopes envelope_pair(double delta, const ReflectionParams& p);

/// Two-term Maclaurin expansion of the envelopes in delta/d:
///   (20/ln 10) (ln(1 +- gamma) -+ (eta/2) (gamma/(gamma+1)) (delta/d)).
/// Accurate for delta << d.
Envelopes envelope_linearized(double delta, const ReflectionParams& p);

/// Line-of-sight received power (dBm): p_s - p_1 - 10 eta log10(d / d_1).
double los_power(const PathLossParams& p, double d);

} // namespace rti
