#pragma once

#include <stdexcept>

#include "beamtrack/model.hpp"

namespace beamtrack {

/// Equal-power gain vector: every sensor spends p_max / N, i.e.
///   a_i = sqrt(p_max / N) / sqrt(sigma_theta2 + sigma_v2_i)  (real, phaseless).
GainVector equal_power_gain(const SensorNetwork& network, double sigma_theta2,
                            double p_max);

/// Data for the MSE outage event {P_{n|n} > epsilon} under equal-power
/// transmission, with the channel fading h_tilde ~ CN(0, I) as the only
/// randomness. The event is equivalent to {snr < beta} with
///   beta = (p_pred - epsilon) / (epsilon * p_pred),
/// and further to the quadratic-form event {h_tilde^H B h_tilde < beta
/// sigma_w2} with B = v v^H - beta E, v_i = a_i / d_i^gamma and
/// E_ii = |a_i|^2 sigma_v2_i / d_i^{2 gamma}.
struct OutageInstance {
  SensorNetwork network;
  double sigma_theta2 = 1.0;
  double p_max = 1.0;
  double p_pred = 1.0;   ///< predicted MSE entering the measurement update
  double epsilon = 0.3;  ///< MSE outage threshold

  GainVector gain;          ///< the equal-power gains
  Eigen::VectorXd v;        ///< path-loss-scaled gains a_i / d_i^gamma
  Eigen::VectorXd e_diag;   ///< E_ii, the fading-noise weights
  double beta = 0.0;        ///< SNR threshold; <= 0 means outage impossible
};

OutageInstance make_outage_instance(const SensorNetwork& network,
                                    double sigma_theta2, double p_max,
                                    double p_pred, double epsilon);

/// B = v v^T - beta E (real symmetric) and its eigenvalues in descending
/// order. B has at most one positive eigenvalue.
struct OutageMatrix {
  Eigen::MatrixXd b;
  Eigen::VectorXd eigenvalues;  ///< descending
};
OutageMatrix outage_matrix(const OutageInstance& inst);

/// Thrown if the top eigenvalue is numerically indistinguishable from a
/// lower one, which would put a zero in the closed form's denominator.
/// Cannot occur while lambda_1 > 0 strictly dominates the (nonpositive)
/// remainder; kept as a guard against degenerate inputs.
class EigenvalueDegeneracy : public std::runtime_error {
 public:
  explicit EigenvalueDegeneracy(double gap);
  double gap;
};

/// Closed-form outage probability
///   P_out = 1 - lambda_1^{N-1} / prod_{l>=2}(lambda_1 - lambda_l)
///             * exp(-beta sigma_w2 / lambda_1),
/// evaluated in the log domain. Returns 1 when lambda_1 <= 0 (the quadratic
/// form is then almost surely below any positive threshold) and 0 when
/// beta <= 0 (epsilon at or above p_pred: the outage event is empty).
double outage_probability(const OutageInstance& inst);

/// Weyl / interlacing enclosures for the descending eigenvalues of B:
///   lambda_1 in [ |v|^2 - beta e_max , |v|^2 - beta e_min ],
///   lambda_k in [ -beta e_(k) , -beta e_(k-1) ]  for k >= 2,
/// where e_(1) <= ... <= e_(N) are the sorted E_ii. Requires beta > 0.
struct EigenvalueBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};
EigenvalueBounds weyl_bounds(const OutageInstance& inst);

/// Monte Carlo estimate of the outage probability over independent channel
/// draws; trial t uses stream_base.substream(t), so sweeps sharing a base
/// stream see common random numbers across parameter points.
double empirical_outage(const OutageInstance& inst, long trials,
                        const Rng& stream_base);

}  // namespace beamtrack
