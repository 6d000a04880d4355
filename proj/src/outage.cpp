#include "beamtrack/outage.hpp"

#include <algorithm>
#include <cmath>

namespace beamtrack {

using Eigen::Index;
using Eigen::VectorXd;

GainVector equal_power_gain(const SensorNetwork& network, double sigma_theta2,
                            double p_max) {
  const double per_sensor = p_max / static_cast<double>(network.size());
  const VectorXd d = transmit_power_weights(network, sigma_theta2);
  GainVector gain;
  gain.a = (per_sensor / d.array()).sqrt().matrix().cast<Complex>();
  return gain;
}

OutageInstance make_outage_instance(const SensorNetwork& network,
                                    double sigma_theta2, double p_max,
                                    double p_pred, double epsilon) {
  network.validate();
  if (!(p_pred > 0.0))
    throw std::invalid_argument("make_outage_instance: p_pred must be > 0");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("make_outage_instance: epsilon must be > 0");
  OutageInstance inst;
  inst.network = network;
  inst.sigma_theta2 = sigma_theta2;
  inst.p_max = p_max;
  inst.p_pred = p_pred;
  inst.epsilon = epsilon;
  inst.gain = equal_power_gain(network, sigma_theta2, p_max);
  const VectorXd path = network.distances.array().pow(-network.gamma);
  const VectorXd amag = inst.gain.a.real();  // equal-power gains are real
  inst.v = amag.cwiseProduct(path);
  inst.e_diag = amag.cwiseAbs2()
                    .cwiseProduct(network.sigma_v2)
                    .cwiseProduct(path.cwiseAbs2());
  inst.beta = (p_pred - epsilon) / (epsilon * p_pred);
  return inst;
}

OutageMatrix outage_matrix(const OutageInstance& inst) {
  OutageMatrix om;
  om.b = inst.v * inst.v.transpose();
  om.b.diagonal() -= inst.beta * inst.e_diag;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(om.b,
                                                    Eigen::EigenvaluesOnly);
  om.eigenvalues = es.eigenvalues().reverse();  // descending
  return om;
}

EigenvalueDegeneracy::EigenvalueDegeneracy(double g)
    : std::runtime_error(
          "outage_probability: top eigenvalue is degenerate (gap " +
          std::to_string(g) + ")"),
      gap(g) {}

double outage_probability(const OutageInstance& inst) {
  if (inst.beta <= 0.0) return 0.0;  // threshold above the MSE's range
  const OutageMatrix om = outage_matrix(inst);
  const VectorXd& lam = om.eigenvalues;
  const Index n = lam.size();
  const double l1 = lam[0];
  if (l1 <= 0.0) return 1.0;  // no direction beats the threshold

  // P(sum_l lam_l Exp_l > c) for c > 0 has contributions only from the
  // positive eigenvalue; repeated *negative* eigenvalues are harmless.
  double log_term = 0.0;
  for (Index l = 1; l < n; ++l) {
    const double gap = l1 - lam[l];
    if (gap <= 1e-12 * std::max(1.0, std::abs(l1)))
      throw EigenvalueDegeneracy(gap);
    log_term += std::log(l1) - std::log(gap);
  }
  const double c = inst.beta * inst.network.sigma_w2;
  const double log_tail = log_term - c / l1;
  return 1.0 - std::exp(log_tail);
}

EigenvalueBounds weyl_bounds(const OutageInstance& inst) {
  if (!(inst.beta > 0.0))
    throw std::invalid_argument("weyl_bounds: requires beta > 0");
  const Index n = inst.e_diag.size();
  VectorXd e_sorted = inst.e_diag;
  std::sort(e_sorted.data(), e_sorted.data() + n);  // ascending
  const double vnorm2 = inst.v.squaredNorm();

  EigenvalueBounds bounds;
  bounds.lower.resize(n);
  bounds.upper.resize(n);
  bounds.lower[0] = vnorm2 - inst.beta * e_sorted[n - 1];
  bounds.upper[0] = vnorm2 - inst.beta * e_sorted[0];
  for (Index k = 1; k < n; ++k) {
    // rank-one-update interlacing against the eigenvalues of -beta E
    bounds.lower[k] = -inst.beta * e_sorted[k];
    bounds.upper[k] = -inst.beta * e_sorted[k - 1];
  }
  return bounds;
}

double empirical_outage(const OutageInstance& inst, long trials,
                        const Rng& stream_base) {
  if (trials <= 0)
    throw std::invalid_argument("empirical_outage: trials must be > 0");
  const Index n = inst.network.size();
  const VectorXd path = inst.network.distances.array().pow(-inst.network.gamma);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    Rng rng = stream_base.substream(static_cast<std::uint64_t>(t));
    Complex signal{0.0, 0.0};
    double noise = inst.network.sigma_w2;
    for (Index i = 0; i < n; ++i) {
      const Complex h = rng.cgaussian(1.0) * path[i];
      const double a = inst.gain.a[i].real();  // equal-power gains are real
      signal += a * h;
      noise += a * a * std::norm(h) * inst.network.sigma_v2[i];
    }
    const double snr = std::norm(signal) / noise;
    if (snr < inst.beta) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace beamtrack
