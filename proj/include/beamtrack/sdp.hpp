#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace beamtrack::sdp {

/// Complex semidefinite program in the trace form
///   maximize    tr(A * objective)
///   subject to  tr(A * eq_lhs) = 1,
///               tr(A * ineq[i]) <= 0   for each i,
///               A >= 0 (Hermitian PSD).
/// All data matrices must be Hermitian; eq_lhs must be PSD with positive
/// trace (so the feasible set is bounded and the equality normalizes A).
struct SdpProblem {
  Eigen::MatrixXcd objective;
  Eigen::MatrixXcd eq_lhs;
  std::vector<Eigen::MatrixXcd> ineq;

  Eigen::Index dim() const { return objective.rows(); }
  void validate() const;  ///< throws std::invalid_argument with the defect
};

enum class SdpStatus {
  Optimal,        ///< KKT residuals within tolerance
  MaxIterations,  ///< ran out of iterations before reaching tolerance
  Infeasible,     ///< step lengths collapsed / dual diverged
};

/// Residuals of the first-order optimality system, all in the original
/// complex units (not the internal real embedding).
struct KktResiduals {
  double primal = 0.0;          ///< max violation of eq/ineq/PSD feasibility
  double dual_min_eig = 0.0;    ///< dual-cone margin: min of the slack G's
                                ///< smallest eigenvalue and the smallest
                                ///< inequality multiplier
  double complementarity = 0.0; ///< |tr(A G)|
  double duality_gap = 0.0;     ///< dual objective - primal objective
};

struct SdpSolution {
  Eigen::MatrixXcd a;        ///< primal matrix iterate
  Eigen::VectorXd ineq_duals;///< one per inequality; nonnegative up to the
                             ///< dual feasibility tolerance
  double eq_dual = 0.0;      ///< z, multiplier of the trace equality
  double objective_value = 0.0;
  SdpStatus status = SdpStatus::MaxIterations;
  int iterations = 0;
  KktResiduals kkt;
};

struct SolveOptions {
  double feas_tol = 1e-8;   ///< primal/dual feasibility tolerance
  double gap_tol = 3e-8;    ///< relative duality-gap tolerance
  int max_iter = 200;
  std::ostream* trace = nullptr;  ///< per-iteration diagnostics, if set
};

/// Primal-dual Nesterov-Todd interior-point solve with a Mehrotra
/// predictor-corrector. Deterministic: no randomized pivoting or seeding.
/// An optional strictly feasible primal starting matrix can be supplied;
/// otherwise the solver cold-starts on the identity (infeasible start).
SdpSolution solve(const SdpProblem& prob, const SolveOptions& opts = {});
SdpSolution solve(const SdpProblem& prob, const Eigen::MatrixXcd& primal_init,
                  const SolveOptions& opts = {});

/// KKT audit of a solution against the problem data, recomputed from scratch:
/// primal feasibility, PSD-ness of the dual slack
///   G = sum_i y_i * ineq[i] + z * eq_lhs - objective,
/// and the complementarity residual tr(A G).
KktResiduals kkt_check(const SdpProblem& prob, const SdpSolution& sol);

}  // namespace beamtrack::sdp
