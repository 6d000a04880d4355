#pragma once

#include <stdexcept>

#include "beamtrack/model.hpp"
#include "beamtrack/sdp.hpp"

namespace beamtrack {

/// Homogenized (lifted) form of the SNR maximization under per-sensor power
/// constraints |a_i|^2 (sigma_theta2 + sigma_v2_i) <= p_max_i. With the
/// augmented variable a_bar = [t a; t] and A = a_bar a_bar^H, the fractional
/// objective becomes the linear SDP
///   max tr(A Hbar)  s.t.  tr(A Cbar) = 1,  tr(A Dbar_i) <= 0,  A >= 0,
/// where Hbar = blkdiag(h h^H, 0), Cbar = blkdiag(H V H^H, sigma_w2) and
/// Dbar_i = blkdiag(D_i e_i e_i^T, -p_max_i).
struct LiftedInstance {
  Eigen::VectorXcd h;
  Eigen::VectorXd sigma_v2;
  Eigen::VectorXd d_diag;    ///< sigma_theta2 + sigma_v2_i
  Eigen::VectorXd hvh_diag;  ///< |h_i|^2 sigma_v2_i
  Eigen::VectorXd p_max_i;
  double sigma_w2 = 0.5;

  Eigen::Index sensors() const { return h.size(); }
  sdp::SdpProblem problem() const;  ///< assemble Hbar / Cbar / Dbar_i
};

LiftedInstance lift(const ChannelRealization& channel,
                    const SensorNetwork& network, double sigma_theta2,
                    const Eigen::VectorXd& p_max_i);

/// Strictly feasible interior starting matrix for the lifted SDP:
///   A_f = diag(a b, ..., a b, b),
///   a = 0.5 * min_i p_max_i / (sigma_theta2 + sigma_v2_i),
///   b = 1 / (a * sum_i |h_i|^2 sigma_v2_i + sigma_w2).
/// Satisfies the trace equality exactly and every power inequality strictly.
Eigen::MatrixXcd feasible_init(const LiftedInstance& inst);

/// Thrown when the SDP optimum is not numerically rank one, i.e. the
/// second eigenvalue is not negligible against the first. The relaxation
/// is tight for this problem family, so this indicates the solver stopped
/// short of optimality rather than a genuine rank gap.
class RankRecoveryFailure : public std::runtime_error {
 public:
  RankRecoveryFailure(double lambda1, double lambda2);
  double lambda1;
  double lambda2;
};

struct IndividualSolution {
  GainVector gain;            ///< recovered rank-one gain vector
  sdp::SdpSolution sdp;       ///< full SDP certificate
  double snr = 0.0;           ///< objective value (equals the SNR of gain)
  double rank_ratio = 0.0;    ///< lambda2 / lambda1 of its leading N x N block
};

/// Solve the lifted SDP from the feasible start and recover the gain from
/// the dominant eigenpair of the leading N x N block, rescaled by the
/// homogenization corner: a = u sqrt(lambda_1 / A_{N+1,N+1}), with the
/// global phase rotated so a^H h is real and nonnegative. The returned
/// certificate's matrix is the rank-one vertex of the optimal face (the
/// lift of the recovered gain) with its KKT residuals re-audited, while
/// `snr` and `rank_ratio` keep the raw solver optimum's objective and
/// leading-block eigenvalue ratio. Throws RankRecoveryFailure if that
/// block is not rank one within `rank_tol`, and std::runtime_error if the
/// solver does not reach Optimal status after deterministic retries.
IndividualSolution solve_individual(const LiftedInstance& inst,
                                    const sdp::SolveOptions& opts = {},
                                    double rank_tol = 1e-5);

/// Per-sensor power overshoot (positive entries = violation) of a gain
/// vector against the individual constraints; useful for audits.
Eigen::VectorXd power_violations(const GainVector& gain,
                                 const LiftedInstance& inst);

}  // namespace beamtrack
