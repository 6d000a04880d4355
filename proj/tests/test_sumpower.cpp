#include <cmath>
#include <limits>

#include <doctest.h>

#include "beamtrack/kalman.hpp"
#include "beamtrack/sumpower.hpp"

using namespace beamtrack;

namespace {

SensorNetwork random_network(int n, Rng& rng, double sv_lo = 0.05,
                             double sv_hi = 0.5) {
  SensorNetwork net;
  net.distances.resize(n);
  net.sigma_v2.resize(n);
  for (int i = 0; i < n; ++i) net.distances[i] = rng.uniform(2.0, 8.0);
  for (int i = 0; i < n; ++i) net.sigma_v2[i] = rng.uniform(sv_lo, sv_hi);
  net.gamma = 1.0;
  net.sigma_w2 = 0.5;
  return net;
}

/// Scale a gain onto the power boundary a^H D a = p_max.
GainVector project_to_budget(const Eigen::VectorXcd& a,
                             const SumPowerInstance& inst) {
  GainVector g;
  const double power = a.cwiseAbs2().dot(inst.d_diag);
  g.a = a * std::sqrt(inst.p_max / power);
  return g;
}

/// Independent ascent oracle for the closed form. On the power boundary the
/// SNR equals the scale-invariant ratio
///   G(b) = p |b^H h|^2 / (p b^H F b + sigma_w2 b^H D b),
/// so we ascend G with exact line searches: along b + t grad both numerator
/// and denominator are real quadratics in t, and the stationary points of
/// their ratio solve a scalar quadratic.
double ascent_oracle(const SumPowerInstance& inst, Eigen::VectorXcd b,
                     int iters) {
  const double p = inst.p_max;
  const Eigen::VectorXd q =
      p * inst.hvh_diag + inst.sigma_w2 * inst.d_diag;  // p F + sigma_w2 D

  const auto value = [&](const Eigen::VectorXcd& v) {
    return p * std::norm(v.dot(inst.h)) / v.cwiseAbs2().dot(q);
  };
  double cur = value(b);
  for (int it = 0; it < iters; ++it) {
    const Complex hb = inst.h.dot(b);  // h^H b
    const double den = b.cwiseAbs2().dot(q);
    const Eigen::VectorXcd grad =
        (p * inst.h * hb * den -
         p * std::norm(hb) * q.cast<Complex>().cwiseProduct(b)) /
        (den * den);
    // quadratics N(t), D(t) of the ratio along b + t grad
    const Complex hg = inst.h.dot(grad);
    const double n0 = p * std::norm(hb);
    const double n1 = 2.0 * p * std::real(std::conj(hb) * hg);
    const double n2 = p * std::norm(hg);
    const double d0 = den;
    const double d1 =
        2.0 * std::real(grad.dot(q.cast<Complex>().cwiseProduct(b)));
    const double d2 = grad.cwiseAbs2().dot(q);
    // stationary points: (N' D - N D')(t) = A t^2 + B t + C = 0
    const double A = n2 * d1 - n1 * d2;
    const double B = 2.0 * (n2 * d0 - n0 * d2);
    const double C = n1 * d0 - n0 * d1;
    double best_t = 0.0;
    double best_val = cur;
    auto consider = [&](double t) {
      if (!std::isfinite(t)) return;
      const double dq = d0 + t * (d1 + t * d2);
      if (dq <= 0.0) return;
      const double val = (n0 + t * (n1 + t * n2)) / dq;
      if (val > best_val) {
        best_val = val;
        best_t = t;
      }
    };
    if (std::abs(A) > 0.0) {
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        consider((-B + r) / (2.0 * A));
        consider((-B - r) / (2.0 * A));
      }
    } else if (std::abs(B) > 0.0) {
      consider(-C / B);
    }
    if (d2 > 0.0 && n2 / d2 > best_val) {
      // the supremum along this line sits at t -> infinity
      b = grad;
      cur = value(b);
      continue;
    }
    if (best_t == 0.0) break;  // no improving stationary point: done
    b += best_t * grad;
    b /= b.cwiseAbs().maxCoeff();  // keep the scale-invariant iterate tame
    const double val = value(b);
    if (val <= cur * (1.0 + 1e-15)) {
      cur = std::max(cur, val);
      break;
    }
    cur = val;
  }
  return cur;
}

SumPowerInstance random_instance(int n, double p_max, Rng& rng) {
  const SensorNetwork net = random_network(n, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  return make_sum_power_instance(ch, net, 1.0, p_max);
}

}  // namespace

TEST_CASE("closed form beats random search and projected ascent") {
  Rng rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    const double p_max = rng.uniform() < 0.5 ? 10.0 : 300.0;
    const SumPowerInstance inst = random_instance(n, p_max, rng);

    const double g_star = optimal_snr_sum(inst);
    const GainVector a_star = optimal_gain_sum(inst);

    // the closed-form value and the closed-form vector agree
    CHECK(snr_objective(a_star, inst) ==
          doctest::Approx(g_star).epsilon(1e-10));
    // the power constraint is tight
    CHECK(a_star.a.cwiseAbs2().dot(inst.d_diag) ==
          doctest::Approx(p_max).epsilon(1e-12));

    double best = 0.0;
    Eigen::VectorXcd best_raw(n);
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXcd a(n);
      for (int i = 0; i < n; ++i) a[i] = rng.cgaussian(1.0);
      const double g = snr_objective(project_to_budget(a, inst), inst);
      if (g > best) {
        best = g;
        best_raw = a;
      }
    }
    Eigen::VectorXcd a0(n);
    for (int i = 0; i < n; ++i) a0[i] = rng.cgaussian(1.0);
    best = std::max(best, ascent_oracle(inst, a0, 500));
    best = std::max(best, ascent_oracle(inst, best_raw, 500));

    CHECK(g_star >= best - 1e-6);
    // ascent initialized anywhere must not leave the closed form behind
    CHECK(best >= g_star * (1.0 - 1e-3));
  }
}

TEST_CASE("optimum is monotone in the power budget") {
  Rng rng(202);
  SumPowerInstance inst = random_instance(5, 1.0, rng);
  double prev = 0.0;
  for (double p : {0.5, 1.0, 5.0, 50.0, 500.0, 5000.0}) {
    inst.p_max = p;
    const double g = optimal_snr_sum(inst);
    CHECK(g >= prev);
    prev = g;
  }
}

TEST_CASE("SNR ceiling and MSE floor") {
  Rng rng(303);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 8.0));
    const SensorNetwork net = random_network(n, rng);
    const ChannelRealization ch = sample_channel(net, rng);
    const double ceiling = snr_upper_bound(net);
    CHECK(ceiling == doctest::Approx(net.sigma_v2.cwiseInverse().sum()));
    for (double p : {1.0, 100.0, 1e4, 1e8}) {
      const SumPowerInstance inst = make_sum_power_instance(ch, net, 1.0, p);
      CHECK(optimal_snr_sum(inst) < ceiling);
      CHECK(posterior_mse(1.0, optimal_snr_sum(inst)) >
            mse_lower_bound(1.0, net));
    }
  }
}

TEST_CASE("noiseless sensor makes the ceiling infinite and the floor zero") {
  SensorNetwork net;
  net.distances = Eigen::Vector2d(2.0, 3.0);
  net.sigma_v2 = Eigen::Vector2d(0.0, 0.1);
  net.gamma = 1.0;
  net.sigma_w2 = 0.5;
  CHECK(std::isinf(snr_upper_bound(net)));
  CHECK(mse_lower_bound(1.0, net) == 0.0);
}

TEST_CASE("asymptotic gain approaches the optimum at large budgets") {
  Rng rng(404);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
    SumPowerInstance inst = random_instance(n, 1.0, rng);
    inst.p_max = 1e9;
    const GainVector a_inf = asymptotic_gain(inst);
    CHECK(a_inf.a.cwiseAbs2().dot(inst.d_diag) ==
          doctest::Approx(1e9).epsilon(1e-12));
    const double ratio =
        snr_objective(a_inf, inst) / optimal_snr_sum(inst);
    CHECK(ratio > 1.0 - 1e-4);
    CHECK(ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("asymptotic gain rejects degenerate entries") {
  Rng rng(505);
  SumPowerInstance inst = random_instance(3, 1.0, rng);
  inst.h[1] = Complex(0.0, 0.0);
  inst.hvh_diag[1] = 0.0;
  CHECK_THROWS_AS(asymptotic_gain(inst), std::domain_error);
}

TEST_CASE("first-order optimality: feasible perturbations do not improve") {
  Rng rng(606);
  const SumPowerInstance inst = random_instance(6, 25.0, rng);
  const GainVector a_star = optimal_gain_sum(inst);
  const double g_star = snr_objective(a_star, inst);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXcd d(6);
    for (int i = 0; i < 6; ++i) d[i] = rng.cgaussian(1.0);
    const Eigen::VectorXcd perturbed = a_star.a + 1e-4 * d;
    const double g = snr_objective(project_to_budget(perturbed, inst), inst);
    CHECK(g <= g_star * (1.0 + 1e-9));
  }
}
