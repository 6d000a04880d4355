#pragma once

#include <complex>

#include <Eigen/Dense>

#include "beamtrack/rng.hpp"

namespace beamtrack {

using Complex = std::complex<double>;

/// First-order Gauss-Markov scalar process
///   theta_n = alpha * theta_{n-1} + u_n,   u_n ~ CN(0, sigma_u2).
struct ProcessModel {
  double alpha = 0.9;
  double sigma_u2 = 0.19;
  double sigma_theta2 = 1.0;  ///< stationary (prior) variance of theta

  /// Stationary parameterization: picks sigma_u2 = (1 - alpha^2) * sigma_theta2
  /// so the process variance stays at sigma_theta2 for all n.
  static ProcessModel stationary(double alpha, double sigma_theta2);

  void validate() const;  ///< throws std::invalid_argument on bad parameters
};

/// Static description of the sensor network and its noise levels.
/// Channel magnitudes decay as d_i^{-gamma}.
struct SensorNetwork {
  Eigen::VectorXd distances;  ///< d_i > 0, one per sensor
  double gamma = 1.0;         ///< path-loss exponent
  Eigen::VectorXd sigma_v2;   ///< per-sensor measurement noise variances, >= 0
  double sigma_w2 = 0.5;      ///< fusion-center receiver noise variance, > 0

  Eigen::Index size() const { return distances.size(); }
  void validate() const;
};

/// One draw of the sensor-to-fusion-center fading channel,
///   h_i = h_tilde_i / d_i^gamma,  h_tilde_i ~ CN(0, 1) i.i.d.
struct ChannelRealization {
  Eigen::VectorXcd h_tilde;  ///< unit-variance fading factors
  Eigen::VectorXcd h;        ///< path-loss-scaled coefficients
};

/// Complex amplify-and-forward gain vector; sensor i transmits a_i^* x_i.
struct GainVector {
  Eigen::VectorXcd a;
};

/// Advance the process one step.
Complex step_process(Complex theta, const ProcessModel& model, Rng& rng);

/// Draw theta_0 from the stationary prior CN(0, sigma_theta2).
Complex sample_initial_state(const ProcessModel& model, Rng& rng);

/// Draw a channel realization (consumes exactly network.size() complex draws).
ChannelRealization sample_channel(const SensorNetwork& network, Rng& rng);

/// Per-sensor observation noise v ~ CN(0, diag(sigma_v2)).
Eigen::VectorXcd sample_sensor_noise(const SensorNetwork& network, Rng& rng);

/// Fusion-center observation for a given state, gains, channel and noises:
///   y = a^H h theta + a^H H v + w,   H = diag(h).
Complex combine_observation(Complex theta, const GainVector& gain,
                            const ChannelRealization& channel,
                            const Eigen::VectorXcd& sensor_noise,
                            Complex receiver_noise);

/// As above but drawing v and w from `rng` (N complex draws, then one).
Complex observe(Complex theta, const GainVector& gain,
                const ChannelRealization& channel,
                const SensorNetwork& network, Rng& rng);

/// Diagonal of D = E[x x^H] = (sigma_theta2 + sigma_v2_i): the per-sensor
/// transmit power per unit gain magnitude squared.
Eigen::VectorXd transmit_power_weights(const SensorNetwork& network,
                                       double sigma_theta2);

/// Per-sensor transmit powers |a_i|^2 D_ii and their sum a^H D a.
Eigen::VectorXd sensor_powers(const GainVector& gain,
                              const Eigen::VectorXd& d_diag);
double total_power(const GainVector& gain, const Eigen::VectorXd& d_diag);

}  // namespace beamtrack
