#include "beamtrack/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace beamtrack::sdp {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kHermitianTol = 1e-12;

/// Real symmetric embedding of a Hermitian matrix, scaled by 1/2 so that
/// <embed(M), embed(A)> equals the complex trace inner product tr(M A).
/// With this scaling the real problem's dual multipliers coincide with the
/// complex problem's.
MatrixXd embed_half(const MatrixXcd& m) {
  const Index n = m.rows();
  MatrixXd e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = 0.5 * m.real();
  e.bottomRightCorner(n, n) = 0.5 * m.real();
  e.topRightCorner(n, n) = -0.5 * m.imag();
  e.bottomLeftCorner(n, n) = 0.5 * m.imag();
  return e;
}

/// Unscaled embedding, used for the primal variable itself.
MatrixXd embed_full(const MatrixXcd& m) { return 2.0 * embed_half(m); }

/// Project a real symmetric 2n x 2n iterate back to complex Hermitian form.
/// This is the exact inverse of embed_full on embedded matrices, and the
/// orthogonal projection onto the embedded subspace otherwise (it preserves
/// PSD-ness and every inner product with embedded data matrices).
MatrixXcd extract(const MatrixXd& x) {
  const Index n = x.rows() / 2;
  const MatrixXd re =
      0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  const MatrixXd im =
      0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  MatrixXcd a = re.cast<std::complex<double>>() +
                std::complex<double>(0, 1) * im.cast<std::complex<double>>();
  return 0.5 * (a + a.adjoint());  // hermitize roundoff
}

double hermitian_defect(const MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Solve the Lyapunov-type scaled equation L_lambda(U) = R entrywise:
/// U_ij = 2 R_ij / (lambda_i + lambda_j).
MatrixXd lyap_solve(const VectorXd& lam, const MatrixXd& r) {
  const Index m = lam.size();
  MatrixXd u(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) u(i, j) = 2.0 * r(i, j) / (lam[i] + lam[j]);
  return u;
}

/// Cholesky with a diagonal-ridge retry: near convergence roundoff can push
/// an iterate marginally indefinite even though the step rule kept it inside
/// the cone, and a tiny floor lets the scaling proceed instead of aborting.
Eigen::LLT<MatrixXd> chol_psd(MatrixXd a) {
  Eigen::LLT<MatrixXd> llt(a);
  double ridge =
      1e-14 * std::max(a.trace() / static_cast<double>(a.rows()), 1e-300);
  for (int k = 0; k < 4 && llt.info() != Eigen::Success; ++k) {
    a.diagonal().array() += ridge;
    llt.compute(a);
    ridge *= 100.0;
  }
  return llt;
}

/// Largest step t such that X + t * dX stays PSD, given X = L L^T.
double max_step_psd(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dx) {
  const auto& l = llt.matrixL();
  MatrixXd c = l.solve(dx);
  c = l.solve(c.transpose()).transpose();  // L^{-1} dX L^{-T}
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step_lp(const VectorXd& v, const VectorXd& dv) {
  double t = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) t = std::min(t, -v[i] / dv[i]);
  return t;
}

struct EmbeddedData {
  MatrixXd cobj;                  // objective, embedded & halved
  std::vector<MatrixXd> amats;    // constraint matrices, k=0 the equality
  std::vector<VectorXd> adiags;   // their diagonals when all are diagonal
  bool all_diagonal = false;
  VectorXd b;                     // right-hand sides: e_0
  Index m = 0;                    // PSD block side
  Index q = 0;                    // number of LP slacks (= #inequalities)
  double cnorm = 1.0;
};

EmbeddedData embed_problem(const SdpProblem& prob) {
  EmbeddedData d;
  d.m = 2 * prob.dim();
  d.q = static_cast<Index>(prob.ineq.size());
  d.cobj = embed_half(prob.objective);
  d.amats.reserve(1 + d.q);
  d.amats.push_back(embed_half(prob.eq_lhs));
  for (const auto& g : prob.ineq) d.amats.push_back(embed_half(g));
  d.b = VectorXd::Zero(1 + d.q);
  d.b[0] = 1.0;
  d.all_diagonal = true;
  for (const auto& a : d.amats)
    if ((a - MatrixXd(a.diagonal().asDiagonal())).cwiseAbs().maxCoeff() >
        0.0) {
      d.all_diagonal = false;
      break;
    }
  if (d.all_diagonal)
    for (const auto& a : d.amats) d.adiags.push_back(a.diagonal());
  d.cnorm = std::max(1.0, d.cobj.cwiseAbs().maxCoeff());
  return d;
}

/// <A_k, T> for all k at once.
VectorXd apply_constraints(const EmbeddedData& d, const MatrixXd& t) {
  VectorXd out(d.amats.size());
  if (d.all_diagonal) {
    const VectorXd td = t.diagonal();
    for (size_t k = 0; k < d.adiags.size(); ++k)
      out[static_cast<Index>(k)] = d.adiags[k].dot(td);
  } else {
    for (size_t k = 0; k < d.amats.size(); ++k)
      out[static_cast<Index>(k)] = d.amats[k].cwiseProduct(t).sum();
  }
  return out;
}

/// sum_k y_k A_k.
MatrixXd adjoint(const EmbeddedData& d, const VectorXd& y) {
  MatrixXd out = MatrixXd::Zero(d.m, d.m);
  for (size_t k = 0; k < d.amats.size(); ++k)
    out += y[static_cast<Index>(k)] * d.amats[k];
  return out;
}

/// Schur complement M_kl = <A_k, W A_l W> (+ LP diagonal added by caller).
MatrixXd schur_matrix(const EmbeddedData& d, const MatrixXd& w) {
  const Index p = static_cast<Index>(d.amats.size());
  MatrixXd mmat(p, p);
  if (d.all_diagonal) {
    const MatrixXd wsq = w.cwiseProduct(w);
    MatrixXd dmat(d.m, p);
    for (Index k = 0; k < p; ++k) dmat.col(k) = d.adiags[k];
    mmat = dmat.transpose() * wsq * dmat;
  } else {
    std::vector<MatrixXd> waw(static_cast<size_t>(p));
    for (Index l = 0; l < p; ++l) waw[static_cast<size_t>(l)] = w * d.amats[static_cast<size_t>(l)] * w;
    for (Index k = 0; k < p; ++k)
      for (Index l = k; l < p; ++l) {
        mmat(k, l) = d.amats[static_cast<size_t>(k)].cwiseProduct(waw[static_cast<size_t>(l)]).sum();
        mmat(l, k) = mmat(k, l);
      }
  }
  return 0.5 * (mmat + mmat.transpose());
}

}  // namespace

void SdpProblem::validate() const {
  const Index n = objective.rows();
  if (n == 0 || objective.cols() != n)
    throw std::invalid_argument("SdpProblem: objective must be square");
  if (eq_lhs.rows() != n || eq_lhs.cols() != n)
    throw std::invalid_argument("SdpProblem: eq_lhs dimension mismatch");
  auto check_herm = [](const MatrixXcd& m, const char* name) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermitian_defect(m) > kHermitianTol * scale) {
      throw std::invalid_argument(std::string("SdpProblem: ") + name +
                                  " is not Hermitian");
    }
  };
  check_herm(objective, "objective");
  check_herm(eq_lhs, "eq_lhs");
  for (size_t i = 0; i < ineq.size(); ++i) {
    if (ineq[i].rows() != n || ineq[i].cols() != n)
      throw std::invalid_argument("SdpProblem: ineq dimension mismatch");
    check_herm(ineq[i], "ineq");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
      0.5 * (eq_lhs + eq_lhs.adjoint()), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eq_lhs.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("SdpProblem: eq_lhs must be PSD");
  if (!(eq_lhs.real().trace() > 0.0))
    throw std::invalid_argument("SdpProblem: eq_lhs must have positive trace");
}

SdpSolution solve(const SdpProblem& prob, const SolveOptions& opts) {
  return solve(prob, MatrixXcd(), opts);
}

SdpSolution solve(const SdpProblem& prob, const Eigen::MatrixXcd& primal_init,
                  const SolveOptions& opts) {
  prob.validate();
  const EmbeddedData data = embed_problem(prob);
  const Index m = data.m;
  const Index q = data.q;
  const Index p = q + 1;
  const double nu = static_cast<double>(m + q);

  // --- starting point -------------------------------------------------
  MatrixXd x;
  VectorXd s(q);
  if (primal_init.size() > 0) {
    x = embed_full(primal_init);
    // slack for each inequality: s_i = -tr(A ineq_i); must be > 0 for a
    // strictly feasible start, but any infeasibility is absorbed by the
    // residuals, so only clamp away nonpositive values.
    const VectorXd ax = apply_constraints(data, x);
    for (Index i = 0; i < q; ++i) s[i] = std::max(-ax[i + 1], 1e-8);
  } else {
    const double rho = 1.0 / std::max(prob.eq_lhs.real().trace(), 1e-12);
    x = std::max(rho, 1e-3) * MatrixXd::Identity(m, m);
    s.setConstant(std::max(rho, 1.0));
  }
  VectorXd y = VectorXd::Zero(p);
  const double rho_d = std::max(1.0, data.cobj.norm());
  MatrixXd z = rho_d * MatrixXd::Identity(m, m);
  VectorXd zl = VectorXd::Constant(q, rho_d);

  SdpSolution sol;
  double prev_alpha = 1.0;
  int stall_count = 0;
  // Best iterate seen so far, by worst tolerance ratio; returned instead of
  // the final iterate when the solve ends without reaching optimality.
  double best_merit = std::numeric_limits<double>::infinity();
  double merit = best_merit;
  MatrixXd best_x = x;
  VectorXd best_y = y;
  int best_iter = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    // --- residuals & convergence ------------------------------------
    VectorXd ax = apply_constraints(data, x);
    for (Index i = 0; i < q; ++i) ax[i + 1] += s[i];
    const VectorXd rp = data.b - ax;
    MatrixXd rd = adjoint(data, y) - z - data.cobj;  // want 0
    VectorXd rdl = y.tail(q) - zl;                   // want 0
    const double pobj = data.cobj.cwiseProduct(x).sum();
    const double dobj = y[0];
    const double mu = (x.cwiseProduct(z).sum() + s.dot(zl)) / nu;
    const double pinf = rp.cwiseAbs().maxCoeff() / 2.0;
    const double dinf =
        std::max(rd.cwiseAbs().maxCoeff(),
                 q > 0 ? rdl.cwiseAbs().maxCoeff() : 0.0) /
        (1.0 + data.cnorm);
    const double relgap =
        std::abs(dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opts.trace) {
      *opts.trace << "iter=" << iter << " pobj=" << pobj << " dobj=" << dobj
                  << " pinf=" << pinf << " dinf=" << dinf << " mu=" << mu
                  << " alpha=" << prev_alpha << '\n';
    }

    sol.iterations = iter;
    merit = std::max({pinf / opts.feas_tol, dinf / opts.feas_tol,
                      relgap / opts.gap_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_y = y;
      best_iter = iter;
    }
    if (merit <= 1.0) {
      sol.status = SdpStatus::Optimal;
      break;
    }
    if (iter == opts.max_iter || mu <= 0.0 || iter - best_iter >= 30) {
      // Out of iterations, numerically outside the cone, or no residual
      // progress for many rounds: cut losses and fall back to the best
      // iterate below.
      sol.status = SdpStatus::MaxIterations;
      break;
    }
    if (y.cwiseAbs().maxCoeff() > 1e12 * (1.0 + data.cnorm) ||
        stall_count >= 3) {
      // Dual iterates diverging or steps collapsed repeatedly: the usual
      // footprint of an infeasible or ill-posed instance.
      sol.status = SdpStatus::Infeasible;
      break;
    }

    // --- Nesterov-Todd scaling ---------------------------------------
    const Eigen::LLT<MatrixXd> lltx = chol_psd(0.5 * (x + x.transpose()));
    const Eigen::LLT<MatrixXd> lltz = chol_psd(0.5 * (z + z.transpose()));
    if (lltx.info() != Eigen::Success || lltz.info() != Eigen::Success) {
      sol.status = SdpStatus::MaxIterations;
      break;
    }
    const MatrixXd l = lltx.matrixL();
    const MatrixXd r = lltz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(r.transpose() * l,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd lam = svd.singularValues();
    const VectorXd lam_isqrt = lam.cwiseSqrt().cwiseInverse();
    const MatrixXd g = l * svd.matrixV() * lam_isqrt.asDiagonal();
    // Ginv = Lambda^{1/2} V^T L^{-1}, formed via V^T L^{-1} = (L^{-T} V)^T.
    const MatrixXd ginv =
        lam.cwiseSqrt().asDiagonal() *
        (l.triangularView<Eigen::Lower>().transpose().solve(svd.matrixV()))
            .transpose();
    const MatrixXd w = g * g.transpose();
    const VectorXd lam_lp = (s.array() * zl.array()).sqrt();
    const VectorXd w_lp = (s.array() / zl.array()).sqrt();

    // --- Schur complement --------------------------------------------
    MatrixXd mmat = schur_matrix(data, w);
    for (Index i = 0; i < q; ++i) mmat(i + 1, i + 1) += w_lp[i] * w_lp[i];
    Eigen::LDLT<MatrixXd> mfac(mmat);
    if (mfac.info() != Eigen::Success) {
      sol.status = SdpStatus::MaxIterations;
      break;
    }

    const MatrixXd wrw = w * rd * w;  // residual feed-through, reused
    const VectorXd a_wrw = apply_constraints(data, wrw);

    // One reduced-system solve for a given scaled complementarity target.
    auto solve_newton = [&](const MatrixXd& rc_psd, const VectorXd& rc_lp,
                            MatrixXd& dx_out, VectorXd& ds_out,
                            VectorXd& dy_out, MatrixXd& dz_out,
                            VectorXd& dzl_out) {
      // With rd = A*(y) - Z - C, dual feasibility of the next iterate needs
      // dZ = A*(dy) + rd (and dzl = dy + rdl); substituting that and
      // dX = E - W dZ W into A(dX) + ds = rp gives the reduced system
      //   M dy = <A_k, E> - <A_k, W rd W> + (w rc/lam - w^2 rdl)_k - rp_k.
      const MatrixXd e = g * lyap_solve(lam, rc_psd) * g.transpose();
      VectorXd rhs = apply_constraints(data, e) - a_wrw - rp;
      for (Index i = 0; i < q; ++i)
        rhs[i + 1] +=
            w_lp[i] * rc_lp[i] / lam_lp[i] - w_lp[i] * w_lp[i] * rdl[i];
      dy_out = mfac.solve(rhs);
      // One step of iterative refinement: the Schur complement grows
      // ill-conditioned as mu -> 0 and the correction recovers several
      // digits in the search direction for one extra back-substitution.
      dy_out += mfac.solve(rhs - mmat * dy_out);
      dz_out = adjoint(data, dy_out) + rd;
      dzl_out = dy_out.tail(q) + rdl;
      dx_out = e - w * dz_out * w;
      dx_out = 0.5 * (dx_out + dx_out.transpose());
      ds_out.resize(q);
      for (Index i = 0; i < q; ++i)
        ds_out[i] =
            w_lp[i] * rc_lp[i] / lam_lp[i] - w_lp[i] * w_lp[i] * dzl_out[i];
    };

    // --- predictor ----------------------------------------------------
    MatrixXd rc_aff = MatrixXd::Zero(m, m);
    rc_aff.diagonal() = -lam.cwiseProduct(lam);
    const VectorXd rc_lp_aff = -lam_lp.cwiseProduct(lam_lp);
    MatrixXd dxa, dza;
    VectorXd dsa, dya, dzla;
    solve_newton(rc_aff, rc_lp_aff, dxa, dsa, dya, dza, dzla);

    double ap_aff = std::min({1.0, max_step_psd(lltx, dxa),
                              q > 0 ? max_step_lp(s, dsa)
                                    : std::numeric_limits<double>::infinity()});
    double ad_aff = std::min({1.0, max_step_psd(lltz, dza),
                              q > 0 ? max_step_lp(zl, dzla)
                                    : std::numeric_limits<double>::infinity()});
    const double mu_aff =
        ((x + ap_aff * dxa).cwiseProduct(z + ad_aff * dza).sum() +
         (s + ap_aff * dsa).dot(zl + ad_aff * dzla)) /
        nu;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // --- corrector ----------------------------------------------------
    const MatrixXd dxt = ginv * dxa * ginv.transpose();
    const MatrixXd dzt = g.transpose() * dza * g;
    MatrixXd rc = -0.5 * (dxt * dzt + dzt * dxt);
    rc.diagonal() -= lam.cwiseProduct(lam);
    rc.diagonal().array() += sigma * mu;
    VectorXd rc_lp =
        (sigma * mu - (dsa.array() / w_lp.array()) *
                          (dzla.array() * w_lp.array()) -
         lam_lp.array() * lam_lp.array())
            .matrix();
    MatrixXd dx, dz;
    VectorXd ds, dy, dzl;
    solve_newton(rc, rc_lp, dx, ds, dy, dz, dzl);

    constexpr double tau = 0.99;
    const double ap =
        std::min({1.0, tau * max_step_psd(lltx, dx),
                  q > 0 ? tau * max_step_lp(s, ds)
                        : std::numeric_limits<double>::infinity()});
    const double ad =
        std::min({1.0, tau * max_step_psd(lltz, dz),
                  q > 0 ? tau * max_step_lp(zl, dzl)
                        : std::numeric_limits<double>::infinity()});

    if (ap < 1e-10 && ad < 1e-10) {
      ++stall_count;
    } else {
      stall_count = 0;
    }
    prev_alpha = std::min(ap, ad);

    x += ap * dx;
    s += ap * ds;
    y += ad * dy;
    z += ad * dz;
    zl += ad * dzl;
    // In exact arithmetic the iterates stay on the complex-embedded subspace
    // (the Newton system is invariant under the complex structure), but
    // roundoff drift off it splits the doubled eigenvalue pairs and spoils
    // the Cholesky factors near convergence; project back every step.
    x = embed_full(extract(x));
    z = embed_full(extract(z));
  }

  if (sol.status != SdpStatus::Optimal && best_merit < merit) {
    x = best_x;
    y = best_y;
    sol.iterations = best_iter;
  }
  sol.a = extract(x);
  sol.eq_dual = y[0];
  // Multipliers are reported as produced: forcing tiny negatives to zero
  // would shift the reconstructed dual slack by a p_max-sized multiple and
  // spoil its eigenvalue check far more than the sign slip itself.
  sol.ineq_duals = y.tail(q);
  sol.objective_value =
      sol.a.cwiseProduct(prob.objective.conjugate()).sum().real();
  sol.kkt = kkt_check(prob, sol);
  return sol;
}

KktResiduals kkt_check(const SdpProblem& prob, const SdpSolution& sol) {
  KktResiduals res;
  const MatrixXcd a = 0.5 * (sol.a + sol.a.adjoint());

  auto real_trace_prod = [](const MatrixXcd& u, const MatrixXcd& v) {
    return u.cwiseProduct(v.conjugate()).sum().real();  // tr(U V), Hermitian
  };

  double primal = std::abs(real_trace_prod(a, prob.eq_lhs) - 1.0);
  for (size_t i = 0; i < prob.ineq.size(); ++i)
    primal = std::max(primal, real_trace_prod(a, prob.ineq[i]));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> esa(a, Eigen::EigenvaluesOnly);
  primal = std::max(primal, -esa.eigenvalues().minCoeff());
  res.primal = primal;

  MatrixXcd gdual = sol.eq_dual * prob.eq_lhs - prob.objective;
  for (size_t i = 0; i < prob.ineq.size(); ++i)
    gdual += sol.ineq_duals[static_cast<Index>(i)] * prob.ineq[i];
  Eigen::SelfAdjointEigenSolver<MatrixXcd> esg(
      0.5 * (gdual + gdual.adjoint()), Eigen::EigenvaluesOnly);
  // Dual feasibility is membership of (G, y) in PSD x R+^q, so the margin
  // is the worse of the slack's smallest eigenvalue and the smallest
  // inequality multiplier.
  res.dual_min_eig = esg.eigenvalues().minCoeff();
  if (sol.ineq_duals.size() > 0)
    res.dual_min_eig =
        std::min(res.dual_min_eig, sol.ineq_duals.minCoeff());

  res.complementarity = std::abs(real_trace_prod(a, gdual));
  res.duality_gap = sol.eq_dual - real_trace_prod(a, prob.objective);
  return res;
}

}  // namespace beamtrack::sdp
