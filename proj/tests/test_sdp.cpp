#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include <doctest.h>

#include "beamtrack/indivpower.hpp"
#include "beamtrack/sdp.hpp"
#include "beamtrack/sumpower.hpp"

using namespace beamtrack;
using Eigen::MatrixXcd;

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
  const Eigen::VectorXd p_each = Eigen::VectorXd::Constant(n, p_total / n);
  return lift(ch, net, 1.0, p_each);
}

}  // namespace

TEST_CASE("scalar problem with analytic solution") {
  sdp::SdpProblem prob;
  prob.objective = MatrixXcd::Constant(1, 1, 2.0);
  prob.eq_lhs = MatrixXcd::Constant(1, 1, 1.0);
  // max 2 A s.t. A = 1, A >= 0  ->  A = 1, value 2, dual z = 2
  const sdp::SdpSolution sol = sdp::solve(prob);
  CHECK(sol.status == sdp::SdpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(std::abs(sol.a(0, 0) - Complex(1.0, 0.0)) < 1e-6);
  CHECK(sol.eq_dual == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("two-by-two problem with an active inequality") {
  // max A11 s.t. tr(A) = 1, A11 - A22 <= 0, A >= 0  ->  A = I/2, value 1/2.
  sdp::SdpProblem prob;
  prob.objective = MatrixXcd::Zero(2, 2);
  prob.objective(0, 0) = 1.0;
  prob.eq_lhs = MatrixXcd::Identity(2, 2);
  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  prob.ineq.push_back(d);
  const sdp::SdpSolution sol = sdp::solve(prob);
  CHECK(sol.status == sdp::SdpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(sol.a(0, 0).real() - 0.5) < 1e-5);
  CHECK(std::abs(sol.a(1, 1).real() - 0.5) < 1e-5);
  CHECK(sol.ineq_duals[0] >= -1e-8);
  const sdp::KktResiduals kkt = sdp::kkt_check(prob, sol);
  CHECK(kkt.primal <= 1e-7);
  CHECK(kkt.dual_min_eig >= -1e-7);
  CHECK(kkt.complementarity <= 1e-6);
}

TEST_CASE("validation rejects malformed problems") {
  sdp::SdpProblem prob;
  prob.objective = MatrixXcd::Zero(2, 2);
  prob.objective(0, 1) = Complex(1.0, 0.0);  // not Hermitian
  prob.eq_lhs = MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(sdp::solve(prob), std::invalid_argument);

  prob.objective = MatrixXcd::Identity(2, 2);
  prob.eq_lhs = -MatrixXcd::Identity(2, 2);  // not PSD
  CHECK_THROWS_AS(sdp::solve(prob), std::invalid_argument);

  prob.eq_lhs = MatrixXcd::Identity(3, 3);  // size mismatch
  CHECK_THROWS_AS(sdp::solve(prob), std::invalid_argument);
}

TEST_CASE("contradictory constraints are flagged infeasible") {
  // tr(A) = 1 together with tr(A) <= 0 cannot hold for A >= 0.
  sdp::SdpProblem prob;
  prob.objective = MatrixXcd::Identity(2, 2);
  prob.eq_lhs = MatrixXcd::Identity(2, 2);
  prob.ineq.push_back(MatrixXcd::Identity(2, 2));
  const sdp::SdpSolution sol = sdp::solve(prob);
  CHECK(sol.status == sdp::SdpStatus::Infeasible);
}

TEST_CASE("iteration cap reports MaxIterations") {
  Rng rng(71);
  const LiftedInstance inst = random_lifted(4, 40.0, rng);
  sdp::SolveOptions opts;
  opts.max_iter = 1;
  const sdp::SdpSolution sol = sdp::solve(inst.problem(), opts);
  CHECK(sol.status == sdp::SdpStatus::MaxIterations);
}

TEST_CASE("lifted instances: optimality, duality, determinism") {
  Rng rng(72);
  for (int n : {1, 2, 3, 5, 8}) {
    const double p_total = n * 30.0;
    const LiftedInstance inst = random_lifted(n, p_total, rng);
    const sdp::SdpProblem prob = inst.problem();

    std::ostringstream trace;
    sdp::SolveOptions opts;
    opts.trace = &trace;
    const sdp::SdpSolution sol = sdp::solve(prob, feasible_init(inst), opts);
    REQUIRE(sol.status == sdp::SdpStatus::Optimal);

    // KKT audit in complex arithmetic, recomputed from the raw data
    const sdp::KktResiduals kkt = sdp::kkt_check(prob, sol);
    CHECK(kkt.primal <= 1e-7);
    CHECK(kkt.dual_min_eig >= -1e-6 * (1.0 + std::abs(sol.objective_value)));
    CHECK(kkt.complementarity <= 1e-6 * (1.0 + std::abs(sol.objective_value)));
    CHECK(sol.eq_dual >= 0.0);
    CHECK((sol.ineq_duals.array() >= -1e-8).all());

    // relaxation dominates every rank-one feasible point
    for (int k = 0; k < 300; ++k) {
      Eigen::VectorXcd a(n);
      for (int i = 0; i < n; ++i) {
        const double mag =
            std::sqrt(inst.p_max_i[i] * rng.uniform() / inst.d_diag[i]);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        a[i] = mag * Complex(std::cos(phase), std::sin(phase));
      }
      const double g = std::norm(a.dot(inst.h)) /
                       (a.cwiseAbs2().dot(inst.hvh_diag) + inst.sigma_w2);
      CHECK(g <= sol.objective_value + 1e-6 * (1.0 + sol.objective_value));
    }

    // relaxation is dominated by the sum-power optimum at the pooled budget
    SumPowerInstance pooled;
    pooled.h = inst.h;
    pooled.hvh_diag = inst.hvh_diag;
    pooled.d_diag = inst.d_diag;
    pooled.sigma_w2 = inst.sigma_w2;
    pooled.p_max = inst.p_max_i.sum();
    CHECK(sol.objective_value <=
          optimal_snr_sum(pooled) * (1.0 + 1e-7));

    // weak duality on traced iterates: once primal and dual are feasible,
    // the dual objective must sit above the primal one.
    std::string line;
    std::istringstream in(trace.str());
    int audited = 0;
    while (std::getline(in, line)) {
      double pobj, dobj, pinf, dinf;
      if (std::sscanf(line.c_str(),
                      "iter=%*d pobj=%lf dobj=%lf pinf=%lf dinf=%lf", &pobj,
                      &dobj, &pinf, &dinf) == 4 &&
          pinf < 1e-8 && dinf < 1e-8) {
        CHECK(dobj >= pobj - 1e-6 * (1.0 + std::abs(dobj)));
        ++audited;
      }
    }
    CHECK(audited > 0);

    // byte determinism of the solve
    const sdp::SdpSolution again = sdp::solve(prob, feasible_init(inst));
    CHECK(std::memcmp(&sol.objective_value, &again.objective_value,
                      sizeof(double)) == 0);
    CHECK(sol.iterations == again.iterations);
  }
}

TEST_CASE("cold start reaches the same optimum as the warm start") {
  Rng rng(73);
  const LiftedInstance inst = random_lifted(4, 120.0, rng);
  const sdp::SdpProblem prob = inst.problem();
  const sdp::SdpSolution warm = sdp::solve(prob, feasible_init(inst));
  const sdp::SdpSolution cold = sdp::solve(prob);
  REQUIRE(warm.status == sdp::SdpStatus::Optimal);
  REQUIRE(cold.status == sdp::SdpStatus::Optimal);
  CHECK(warm.objective_value ==
        doctest::Approx(cold.objective_value).epsilon(1e-6));
}
