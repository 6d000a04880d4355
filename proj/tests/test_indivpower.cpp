#include <cmath>

#include <doctest.h>

#include "beamtrack/indivpower.hpp"
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

LiftedInstance random_lifted(int n, double p_total, Rng& rng) {
  const SensorNetwork net = random_network(n, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  return lift(ch, net, 1.0, Eigen::VectorXd::Constant(n, p_total / n));
}

double lifted_snr(const GainVector& gain, const LiftedInstance& inst) {
  return std::norm(gain.a.dot(inst.h)) /
         (gain.a.cwiseAbs2().dot(inst.hvh_diag) + inst.sigma_w2);
}

}  // namespace

TEST_CASE("feasible starting matrix: hand-checked single-sensor case") {
  // h = 1, sigma_v2 = 1, sigma_theta2 = 1, sigma_w2 = 1, p_max = 2:
  // a = 0.5 * (2 / 2) = 0.5, b = 1 / (0.5 * 1 + 1) = 2/3  ->  diag(1/3, 2/3).
  LiftedInstance inst;
  inst.h = Eigen::VectorXcd::Constant(1, Complex(1.0, 0.0));
  inst.sigma_v2 = Eigen::VectorXd::Constant(1, 1.0);
  inst.d_diag = Eigen::VectorXd::Constant(1, 2.0);
  inst.hvh_diag = Eigen::VectorXd::Constant(1, 1.0);
  inst.p_max_i = Eigen::VectorXd::Constant(1, 2.0);
  inst.sigma_w2 = 1.0;
  const Eigen::MatrixXcd a0 = feasible_init(inst);
  CHECK(a0(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(a0(1, 1).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("feasible starting matrix is strictly interior") {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 8.0));
    const LiftedInstance inst = random_lifted(n, 10.0 * n, rng);
    const sdp::SdpProblem prob = inst.problem();
    const Eigen::MatrixXcd a0 = feasible_init(inst);

    auto tr = [](const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
      return u.cwiseProduct(v.conjugate()).sum().real();
    };
    CHECK(tr(a0, prob.eq_lhs) == doctest::Approx(1.0).epsilon(1e-14));
    for (const auto& d : prob.ineq) CHECK(tr(a0, d) < 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a0,
                                                       Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("rank-one recovery returns a feasible gain achieving the bound") {
  Rng rng(42);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
    const double p_total = rng.uniform() < 0.5 ? 30.0 : 300.0;
    const LiftedInstance inst = random_lifted(n, p_total, rng);
    const IndividualSolution sol = solve_individual(inst);

    CHECK(sol.rank_ratio <= 1e-6);
    CHECK((power_violations(sol.gain, inst).array() <=
           (1e-8 * (1.0 + inst.p_max_i.array())))
              .all());
    CHECK(lifted_snr(sol.gain, inst) ==
          doctest::Approx(sol.snr).epsilon(1e-5));
  }
}

TEST_CASE("single sensor: individual constraint equals a sum constraint") {
  Rng rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    const SensorNetwork net = random_network(1, rng);
    const ChannelRealization ch = sample_channel(net, rng);
    const double p = rng.uniform(1.0, 50.0);
    const LiftedInstance inst =
        lift(ch, net, 1.0, Eigen::VectorXd::Constant(1, p));
    const SumPowerInstance sum_inst = make_sum_power_instance(ch, net, 1.0, p);
    const IndividualSolution sol = solve_individual(inst);
    CHECK(sol.snr == doctest::Approx(optimal_snr_sum(sum_inst)).epsilon(1e-6));
  }
}

TEST_CASE("individual optimum is sandwiched between equal power and pooled") {
  Rng rng(44);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
    const SensorNetwork net = random_network(n, rng);
    const ChannelRealization ch = sample_channel(net, rng);
    const double p = 40.0 * n;
    const LiftedInstance inst =
        lift(ch, net, 1.0, Eigen::VectorXd::Constant(n, p / n));
    const SumPowerInstance pooled = make_sum_power_instance(ch, net, 1.0, p);
    const IndividualSolution sol = solve_individual(inst);

    // equal-power split (a real multiple of the per-sensor cap) is feasible
    Eigen::VectorXcd ae =
        (inst.p_max_i.array() / inst.d_diag.array()).sqrt().cast<Complex>();
    const double g_equal = lifted_snr({ae}, inst);
    CHECK(sol.snr >= g_equal - 1e-6 * (1.0 + g_equal));
    CHECK(sol.snr <= optimal_snr_sum(pooled) * (1.0 + 1e-7));
  }
}

TEST_CASE("overtight rank tolerance raises RankRecoveryFailure") {
  Rng rng(45);
  const LiftedInstance inst = random_lifted(4, 100.0, rng);
  CHECK_THROWS_AS(solve_individual(inst, sdp::SolveOptions{}, 1e-14),
                  RankRecoveryFailure);
}

TEST_CASE("lift validates its inputs") {
  Rng rng(46);
  const SensorNetwork net = random_network(3, rng);
  const ChannelRealization ch = sample_channel(net, rng);
  CHECK_THROWS_AS(lift(ch, net, 1.0, Eigen::VectorXd::Constant(2, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(lift(ch, net, 1.0, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
}
