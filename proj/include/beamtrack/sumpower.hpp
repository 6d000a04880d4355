#pragma once

#include "beamtrack/model.hpp"

namespace beamtrack {

/// Everything needed to optimize the effective SNR
///   g(a) = |a^H h|^2 / (a^H H V H^H a + sigma_w2)
/// under the sum transmit-power constraint a^H D a <= p_max, where
/// D = diag(sigma_theta2 + sigma_v2_i) and H V H^H = diag(|h_i|^2 sigma_v2_i).
struct SumPowerInstance {
  Eigen::VectorXcd h;         ///< channel coefficients
  Eigen::VectorXd hvh_diag;   ///< |h_i|^2 sigma_v2_i
  Eigen::VectorXd d_diag;     ///< sigma_theta2 + sigma_v2_i
  double sigma_w2 = 0.5;
  double p_max = 1.0;
};

SumPowerInstance make_sum_power_instance(const ChannelRealization& channel,
                                         const SensorNetwork& network,
                                         double sigma_theta2, double p_max);

/// Effective SNR g(a) of an arbitrary gain vector on this instance.
double snr_objective(const GainVector& gain, const SumPowerInstance& inst);

/// Diagonal of B = H V H^H + (sigma_w2 / p_max) D.
Eigen::VectorXd noise_plus_power_diag(const SumPowerInstance& inst);

/// Closed-form maximizer of g(a) subject to a^H D a <= p_max:
///   a* = sqrt(p_max / (h^H B^{-1} D B^{-1} h)) * B^{-1} h.
/// The constraint is tight at the optimum.
GainVector optimal_gain_sum(const SumPowerInstance& inst);

/// Optimal objective value g(a*) = h^H B^{-1} h, computed without forming a*.
double optimal_snr_sum(const SumPowerInstance& inst);

/// Infinite-power SNR ceiling sum_i 1 / sigma_v2_i. Returns +infinity if any
/// sigma_v2_i == 0 (noiseless sensor): the ceiling is then unbounded.
double snr_upper_bound(const SensorNetwork& network);

/// MSE floor p_pred / (1 + p_pred * snr_upper_bound); 0 if the bound is
/// infinite.
double mse_lower_bound(double p_pred, const SensorNetwork& network);

/// Large-p_max limit direction of the optimum, a_i ∝ 1 / (conj(h_i) sigma_v2_i),
/// scaled to a^H D a = p_max. Throws std::domain_error if any h_i or
/// sigma_v2_i is zero (the limit direction is undefined there).
GainVector asymptotic_gain(const SumPowerInstance& inst);

}  // namespace beamtrack
