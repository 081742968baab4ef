#pragma once
#include <random>

namespace rti {

/// Power-measurement noise model: per-quadrature variance sigma2 (linear
/// power), K samples averaged per power reading, and the RSSI register
/// quantization step in dB (0 disables quantization).
struct NoiseModel {
    double sigma2 = 1.0;
    int k_samples = 512;
    double quantization_step_db = 1.0;

    void validate() const;
};

/// r-th raw moment of a Gamma(shape, scale) variate:
/// scale^r * Gamma(shape + r) / Gamma(shape), exact product form for integer r.
double gamma_raw_moment(double shape, double scale, int r);

/// One draw of the averaged sample power S_K ~ Gamma(K, 2 sigma2 / K).
double sample_power_sum(const NoiseModel& model, std::mt19937_64& rng);

/// Berry-Esseen sup-CDF distance bound between the standardized S_K and the
/// standard normal: 0.8103291 / sqrt(K).
double berry_esseen_bound(int k);

/// Large-K mean of the logarithmic noise term at a given LoS SNR (linear
/// ratio) and reflection effect zeta (dB):
/// 10 log10(1 + (2 / snr_los) 10^(-zeta/10)).
double asymptotic_noise_mean(double snr_los, double zeta_db);

/// 10 log10(1 + s / p_c): the dB noise term for a given power sum draw.
double noise_db_from_sum(double s, double p_c);

/// One draw of the logarithmic measurement noise for a received signal of
/// linear power p_c. Always >= 0.
double measurement_noise_db(const NoiseModel& model, double p_c, std::mt19937_64& rng);

/// Round to the nearest multiple of step (half away from zero). step <= 0
/// returns the value unchanged.
double quantize_db(double value, double step);

} // namespace rti
