#pragma once

#include "beamtrack/model.hpp"

namespace beamtrack {

/// Posterior state of the scalar complex Kalman filter at time n:
/// estimate theta_hat = E[theta_n | y_0..y_n] and MSE p = E|theta - theta_hat|^2.
struct KalmanState {
  Complex theta_hat{0.0, 0.0};
  double p = 1.0;
};

/// One-step prediction (theta_hat_{n|n-1}, P_{n|n-1}).
struct Prediction {
  Complex theta_hat{0.0, 0.0};
  double p = 1.0;
};

/// Time update: theta_hat -> alpha theta_hat, P -> alpha^2 P + sigma_u2.
Prediction predict(const KalmanState& state, const ProcessModel& model);

/// Kalman gain for the combined observation y = a^H h theta + a^H H v + w:
///   k = P_pred (a^H h)^* / (a^H H V H^H a + P_pred |a^H h|^2 + sigma_w2).
Complex kalman_gain(double p_pred, const GainVector& gain,
                    const ChannelRealization& channel,
                    const SensorNetwork& network);

/// Measurement update with a given observation y.
KalmanState update(const Prediction& pred, Complex y, const GainVector& gain,
                   const ChannelRealization& channel,
                   const SensorNetwork& network);

/// Posterior MSE as a function of the effective SNR g of the gain vector:
///   P_{n|n} = P_pred / (1 + g P_pred).
/// Valid for any gain vector, optimal or not, with g = snr_objective(...).
double posterior_mse(double p_pred, double snr);

}  // namespace beamtrack
