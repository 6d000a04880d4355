#include "beamtrack/model.hpp"

#include <cmath>
#include <stdexcept>

namespace beamtrack {

ProcessModel ProcessModel::stationary(double alpha, double sigma_theta2) {
  ProcessModel m;
  m.alpha = alpha;
  m.sigma_theta2 = sigma_theta2;
  m.sigma_u2 = (1.0 - alpha * alpha) * sigma_theta2;
  return m;
}

void ProcessModel::validate() const {
  if (!(std::abs(alpha) < 1.0))
    throw std::invalid_argument("ProcessModel: |alpha| must be < 1");
  if (!(sigma_u2 >= 0.0))
    throw std::invalid_argument("ProcessModel: sigma_u2 must be >= 0");
  if (!(sigma_theta2 > 0.0))
    throw std::invalid_argument("ProcessModel: sigma_theta2 must be > 0");
}

void SensorNetwork::validate() const {
  if (distances.size() == 0)
    throw std::invalid_argument("SensorNetwork: needs at least one sensor");
  if (distances.size() != sigma_v2.size())
    throw std::invalid_argument(
        "SensorNetwork: distances and sigma_v2 must have equal length");
  if ((distances.array() <= 0.0).any())
    throw std::invalid_argument("SensorNetwork: distances must be > 0");
  if ((sigma_v2.array() < 0.0).any())
    throw std::invalid_argument("SensorNetwork: sigma_v2 must be >= 0");
  if (!(sigma_w2 > 0.0))
    throw std::invalid_argument("SensorNetwork: sigma_w2 must be > 0");
}

Complex step_process(Complex theta, const ProcessModel& model, Rng& rng) {
  return model.alpha * theta + rng.cgaussian(model.sigma_u2);
}

Complex sample_initial_state(const ProcessModel& model, Rng& rng) {
  return rng.cgaussian(model.sigma_theta2);
}

ChannelRealization sample_channel(const SensorNetwork& network, Rng& rng) {
  const Eigen::Index n = network.size();
  ChannelRealization ch;
  ch.h_tilde.resize(n);
  ch.h.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ch.h_tilde[i] = rng.cgaussian(1.0);
    ch.h[i] = ch.h_tilde[i] / std::pow(network.distances[i], network.gamma);
  }
  return ch;
}

Eigen::VectorXcd sample_sensor_noise(const SensorNetwork& network, Rng& rng) {
  Eigen::VectorXcd v(network.size());
  for (Eigen::Index i = 0; i < network.size(); ++i)
    v[i] = rng.cgaussian(network.sigma_v2[i]);
  return v;
}

Complex combine_observation(Complex theta, const GainVector& gain,
                            const ChannelRealization& channel,
                            const Eigen::VectorXcd& sensor_noise,
                            Complex receiver_noise) {
  const Complex signal = gain.a.dot(channel.h) * theta;  // a^H h theta
  const Complex forwarded =
      gain.a.dot(channel.h.cwiseProduct(sensor_noise));  // a^H H v
  return signal + forwarded + receiver_noise;
}

Complex observe(Complex theta, const GainVector& gain,
                const ChannelRealization& channel,
                const SensorNetwork& network, Rng& rng) {
  const Eigen::VectorXcd v = sample_sensor_noise(network, rng);
  const Complex w = rng.cgaussian(network.sigma_w2);
  return combine_observation(theta, gain, channel, v, w);
}

Eigen::VectorXd transmit_power_weights(const SensorNetwork& network,
                                       double sigma_theta2) {
  return network.sigma_v2.array() + sigma_theta2;
}

Eigen::VectorXd sensor_powers(const GainVector& gain,
                              const Eigen::VectorXd& d_diag) {
  return gain.a.cwiseAbs2().cwiseProduct(d_diag);
}

double total_power(const GainVector& gain, const Eigen::VectorXd& d_diag) {
  return sensor_powers(gain, d_diag).sum();
}

}  // namespace beamtrack
