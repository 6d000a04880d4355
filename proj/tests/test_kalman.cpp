#include <cmath>
#include <vector>

#include <doctest.h>

#include "beamtrack/kalman.hpp"
#include "beamtrack/sumpower.hpp"

using namespace beamtrack;

namespace {

SensorNetwork random_network(int n, Rng& rng) {
  SensorNetwork net;
  net.distances.resize(n);
  net.sigma_v2.resize(n);
  for (int i = 0; i < n; ++i) net.distances[i] = rng.uniform(2.0, 8.0);
  for (int i = 0; i < n; ++i) net.sigma_v2[i] = rng.uniform(0.05, 0.5);
  net.gamma = 1.0;
  net.sigma_w2 = 0.5;
  return net;
}

GainVector random_gain(int n, Rng& rng) {
  GainVector g;
  g.a.resize(n);
  for (int i = 0; i < n; ++i) g.a[i] = rng.cgaussian(4.0);
  return g;
}

}  // namespace

TEST_CASE("predict applies the process model") {
  const ProcessModel m = ProcessModel::stationary(0.8, 2.0);
  KalmanState st;
  st.theta_hat = Complex(1.0, -2.0);
  st.p = 0.7;
  const Prediction pred = predict(st, m);
  CHECK(pred.theta_hat == Complex(0.8, -1.6));
  CHECK(pred.p == doctest::Approx(0.64 * 0.7 + m.sigma_u2).epsilon(1e-15));
}

TEST_CASE("posterior MSE identity holds for arbitrary gain vectors") {
  // P_{n|n} = P_pred / (1 + g P_pred) with g the effective SNR of *any*
  // gain vector, not only the optimal one.
  Rng rng(777);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    const SensorNetwork net = random_network(n, rng);
    const ChannelRealization ch = sample_channel(net, rng);
    const GainVector gain = random_gain(n, rng);
    const double p_pred = rng.uniform(0.1, 2.0);

    const SumPowerInstance inst = make_sum_power_instance(ch, net, 1.0, 1.0);
    const double g = snr_objective(gain, inst);

    Prediction pred;
    pred.theta_hat = Complex(0.3, 0.4);
    pred.p = p_pred;
    const KalmanState post =
        update(pred, Complex(1.0, 1.0), gain, ch, net);
    CHECK(post.p == doctest::Approx(posterior_mse(p_pred, g)).epsilon(1e-12));
  }
}

TEST_CASE("update uses the Kalman gain") {
  Rng rng(888);
  const SensorNetwork net = random_network(4, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  const GainVector gain = random_gain(4, rng);
  Prediction pred;
  pred.theta_hat = Complex(0.2, -0.1);
  pred.p = 0.9;
  const Complex y{0.7, 0.3};

  const Complex k = kalman_gain(pred.p, gain, ch, net);
  const Complex f = gain.a.dot(ch.h);
  const KalmanState post = update(pred, y, gain, ch, net);
  CHECK(std::abs(post.theta_hat - (pred.theta_hat + k * (y - f * pred.theta_hat))) <
        1e-15);
  // gain denominator must be a^H(HVH^H)a + P|a^H h|^2 + sigma_w2 (all real)
  const double den = (gain.a.cwiseAbs2().array() * ch.h.cwiseAbs2().array() *
                      net.sigma_v2.array())
                         .sum() +
                     net.sigma_w2 + pred.p * std::norm(f);
  CHECK(std::abs(k - pred.p * std::conj(f) / den) < 1e-15);
}

TEST_CASE("zero gain vector degrades to the prediction") {
  Rng rng(11);
  const SensorNetwork net = random_network(3, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  GainVector gain;
  gain.a = Eigen::Vector3cd::Zero();
  Prediction pred;
  pred.theta_hat = Complex(0.5, 0.5);
  pred.p = 0.8;
  const KalmanState post = update(pred, Complex(3.0, -2.0), gain, ch, net);
  CHECK(post.theta_hat == pred.theta_hat);
  CHECK(post.p == pred.p);
}

TEST_CASE("error variance recursion reaches its fixed point") {
  Rng rng(31);
  const ProcessModel m = ProcessModel::stationary(0.9, 1.0);
  const SensorNetwork net = random_network(5, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  const GainVector gain = random_gain(5, rng);
  const SumPowerInstance inst = make_sum_power_instance(ch, net, 1.0, 1.0);
  const double g = snr_objective(gain, inst);

  double p_post = 1.0;
  for (int i = 0; i < 500; ++i)
    p_post = posterior_mse(m.alpha * m.alpha * p_post + m.sigma_u2, g);
  const double fixed =
      posterior_mse(m.alpha * m.alpha * p_post + m.sigma_u2, g);
  CHECK(fixed == doctest::Approx(p_post).epsilon(1e-12));
}

TEST_CASE("filter is statistically consistent on a short run") {
  // Empirical squared error should track the recursion's P_{n|n}.
  Rng master(20260816);
  const ProcessModel model = ProcessModel::stationary(0.9, 1.0);
  Rng setup = master.substream(0x9E3779B97F4A7C15ULL);
  const SensorNetwork net = random_network(3, setup);
  const int steps = 5;
  std::vector<ChannelRealization> chs;
  std::vector<GainVector> gains;
  std::vector<double> p_rec;
  double p_pred = 1.0;
  for (int t = 0; t < steps; ++t) {
    chs.push_back(sample_channel(net, setup));
    const SumPowerInstance inst =
        make_sum_power_instance(chs.back(), net, 1.0, 100.0);
    gains.push_back(optimal_gain_sum(inst));
    const double g = snr_objective(gains.back(), inst);
    p_rec.push_back(posterior_mse(p_pred, g));
    p_pred = model.alpha * model.alpha * p_rec.back() + model.sigma_u2;
  }

  const int trials = 4000;
  std::vector<double> err(steps, 0.0);
  for (int k = 0; k < trials; ++k) {
    Rng rng = master.substream(static_cast<std::uint64_t>(k));
    Complex theta = sample_initial_state(model, rng);
    KalmanState st;
    for (int t = 0; t < steps; ++t) {
      const Prediction pred = predict(st, model);
      const Complex y = observe(theta, gains[t], chs[t], net, rng);
      st = update(pred, y, gains[t], chs[t], net);
      err[t] += std::norm(theta - st.theta_hat);
      theta = step_process(theta, model, rng);
    }
  }
  for (int t = 0; t < steps; ++t) {
    const double emp = err[t] / trials;
    // |e|^2 is roughly exponential with mean P, so SE ~ P/sqrt(trials).
    CHECK(std::abs(emp - p_rec[t]) < 5.0 * p_rec[t] / std::sqrt(trials));
  }
}
