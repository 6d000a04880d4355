#include "beamtrack/sumpower.hpp"

#include <limits>
#include <stdexcept>

namespace beamtrack {

SumPowerInstance make_sum_power_instance(const ChannelRealization& channel,
                                         const SensorNetwork& network,
                                         double sigma_theta2, double p_max) {
  SumPowerInstance inst;
  inst.h = channel.h;
  inst.hvh_diag = channel.h.cwiseAbs2().cwiseProduct(network.sigma_v2);
  inst.d_diag = transmit_power_weights(network, sigma_theta2);
  inst.sigma_w2 = network.sigma_w2;
  inst.p_max = p_max;
  return inst;
}

double snr_objective(const GainVector& gain, const SumPowerInstance& inst) {
  const double signal = std::norm(gain.a.dot(inst.h));
  const double noise =
      gain.a.cwiseAbs2().dot(inst.hvh_diag) + inst.sigma_w2;
  return signal / noise;
}

Eigen::VectorXd noise_plus_power_diag(const SumPowerInstance& inst) {
  return inst.hvh_diag + (inst.sigma_w2 / inst.p_max) * inst.d_diag;
}

GainVector optimal_gain_sum(const SumPowerInstance& inst) {
  const Eigen::VectorXd b = noise_plus_power_diag(inst);
  const Eigen::VectorXcd binv_h = inst.h.cwiseQuotient(b.cast<Complex>());
  // a = c * B^{-1} h with c chosen so the power constraint holds with equality:
  // a^H D a = c^2 * h^H B^{-1} D B^{-1} h = p_max.
  const double quad = binv_h.cwiseAbs2().dot(inst.d_diag);
  GainVector gain;
  gain.a = std::sqrt(inst.p_max / quad) * binv_h;
  return gain;
}

double optimal_snr_sum(const SumPowerInstance& inst) {
  const Eigen::VectorXd b = noise_plus_power_diag(inst);
  return (inst.h.cwiseAbs2().array() / b.array()).sum();
}

double snr_upper_bound(const SensorNetwork& network) {
  if ((network.sigma_v2.array() == 0.0).any())
    return std::numeric_limits<double>::infinity();
  return network.sigma_v2.cwiseInverse().sum();
}

double mse_lower_bound(double p_pred, const SensorNetwork& network) {
  const double bound = snr_upper_bound(network);
  if (std::isinf(bound)) return 0.0;
  return p_pred / (1.0 + p_pred * bound);
}

GainVector asymptotic_gain(const SumPowerInstance& inst) {
  const Eigen::Index n = inst.h.size();
  Eigen::VectorXcd dir(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // 1 / (conj(h_i) sigma_v2_i) = h_i / (|h_i|^2 sigma_v2_i)
    if (inst.h[i] == Complex{0.0, 0.0} || inst.hvh_diag[i] == 0.0)
      throw std::domain_error(
          "asymptotic_gain: undefined when some h_i or sigma_v2_i is zero");
    dir[i] = inst.h[i] / inst.hvh_diag[i];
  }
  const double quad = dir.cwiseAbs2().dot(inst.d_diag);
  GainVector gain;
  gain.a = std::sqrt(inst.p_max / quad) * dir;
  return gain;
}

}  // namespace beamtrack
