#include "rti/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace rti {

void NoiseModel::validate() const {
    if (!(sigma2 > 0.0)) throw std::domain_error("noise sigma2 must be > 0");
    if (k_samples < 1) throw std::domain_error("noise sample count K must be >= 1");
    if (quantization_step_db < 0.0) throw std::domain_error("quantization step must be >= 0");
}

double gamma_raw_moment(double shape, double scale, int r) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::domain_error("gamma_raw_moment: shape and scale must be > 0");
    if (r < 0) throw std::domain_error("gamma_raw_moment: order must be >= 0");
    double acc = 1.0;
    for (int i = 0; i < r; ++i) acc *= scale * (shape + i);
    return acc;
}

double sample_power_sum(const NoiseModel& model, std::mt19937_64& rng) {
    model.validate();
    std::gamma_distribution<double> dist(static_cast<double>(model.k_samples),
                                         2.0 * model.sigma2 / model.k_samples);
    return dist(rng);
}

double berry_esseen_bound(int k) {
    if (k < 1) throw std::domain_error("berry_esseen_bound: K must be >= 1");
    return 0.8103291 / std::sqrt(static_cast<double>(k));
}

double asymptotic_noise_mean(double snr_los, double zeta_db) {
    if (!(snr_los > 0.0)) throw std::domain_error("asymptotic_noise_mean: SNR must be > 0");
    return 10.0 * std::log10(1.0 + 2.0 / snr_los * std::pow(10.0, -zeta_db / 10.0));
}

double noise_db_from_sum(double s, double p_c) {
    return 10.0 * std::log10(1.0 + s / p_c);
}

double measurement_noise_db(const NoiseModel& model, double p_c, std::mt19937_64& rng) {
    if (!(p_c > 0.0)) throw std::domain_error("measurement_noise_db: signal power must be > 0");
    return noise_db_from_sum(sample_power_sum(model, rng), p_c);
}

double quantize_db(double value, double step) {
    if (step <= 0.0) return value;
    return step * std::round(value / step);
}

} // namespace rti
