#include "beamtrack/kalman.hpp"

namespace beamtrack {

namespace {

/// a^H H V H^H a + sigma_w2: total effective noise power at the fusion center.
double effective_noise(const GainVector& gain, const ChannelRealization& channel,
                       const SensorNetwork& network) {
  const double forwarded = (gain.a.cwiseAbs2().array() *
                            channel.h.cwiseAbs2().array() *
                            network.sigma_v2.array())
                               .sum();
  return forwarded + network.sigma_w2;
}

}  // namespace

Prediction predict(const KalmanState& state, const ProcessModel& model) {
  Prediction pred;
  pred.theta_hat = model.alpha * state.theta_hat;
  pred.p = model.alpha * model.alpha * state.p + model.sigma_u2;
  return pred;
}

Complex kalman_gain(double p_pred, const GainVector& gain,
                    const ChannelRealization& channel,
                    const SensorNetwork& network) {
  const Complex f = gain.a.dot(channel.h);  // a^H h
  const double den = effective_noise(gain, channel, network) +
                     p_pred * std::norm(f);
  return p_pred * std::conj(f) / den;
}

KalmanState update(const Prediction& pred, Complex y, const GainVector& gain,
                   const ChannelRealization& channel,
                   const SensorNetwork& network) {
  const Complex f = gain.a.dot(channel.h);
  const double noise = effective_noise(gain, channel, network);
  const double den = noise + pred.p * std::norm(f);
  const Complex k = pred.p * std::conj(f) / den;

  KalmanState post;
  post.theta_hat = pred.theta_hat + k * (y - f * pred.theta_hat);
  post.p = pred.p * noise / den;  // = (1 - k a^H h) P_pred, kept real
  return post;
}

double posterior_mse(double p_pred, double snr) {
  return p_pred / (1.0 + snr * p_pred);
}

}  // namespace beamtrack
