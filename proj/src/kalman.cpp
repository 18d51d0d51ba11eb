#include "mcss/kalman.hpp"

#include <cmath>
#include <complex>

#include "mcss/symmat.hpp"

namespace mcss {

namespace {

// Inverse of a symmetric p.d. matrix through its eigendecomposition.
Matrix inv_spd(const Matrix& m, const char* where) {
  EigenDecomp d = eig_sym(m);
  if (!(d.eigenvalues.minCoeff() > 0.0)) {
    throw NotPsd(std::string(where) + ": matrix must be p.d.");
  }
  Vector inv = d.eigenvalues.cwiseInverse();
  return symmetrized(d.eigenvectors * inv.asDiagonal() * d.eigenvectors.transpose());
}

void check_psd(const Matrix& m, const char* what) {
  const double lam_min = min_eig(m);
  const double lam_max = max_eig(m);
  if (lam_min < -kPsdTol * std::max(1.0, lam_max)) {
    throw NotPsd(std::string(what) + ": matrix must be p.s.d.");
  }
}

}  // namespace

void validate(const LtiSystem& sys) {
  if (sys.A.rows() != sys.A.cols() || sys.A.rows() < 1) {
    throw InvalidMatrix("system: A must be square");
  }
  if (sys.Q.rows() != sys.A.rows() || sys.Q.cols() != sys.A.cols()) {
    throw DimMismatch("system: Q dimension != A dimension");
  }
  if (!sys.A.allFinite() || !sys.Q.allFinite()) {
    throw InvalidMatrix("system: non-finite entries");
  }
  if (!(min_eig(sys.Q) > 0.0)) {
    throw NotPsd("system: Q must be p.d.");
  }
}

Matrix f_map(const LtiSystem& sys, const Matrix& lambda, const Matrix& xi) {
  if (lambda.rows() != sys.dim() || xi.rows() != sys.dim()) {
    throw DimMismatch("f_map: argument dimension != system dimension");
  }
  check_psd(xi, "f_map: Xi");
  const Matrix predicted =
      symmetrized(sys.A * lambda * sys.A.transpose() + sys.Q);
  return inv_spd(symmetrized(inv_spd(predicted, "f_map") + xi), "f_map");
}

Matrix riccati_step(const LtiSystem& sys, const Matrix& p, const Matrix& xi) {
  return f_map(sys, p, xi);
}

SteadyStateResult steady_state(const LtiSystem& sys, const Matrix& xi,
                               const Matrix& p_init, double tol, int max_iter) {
  check_psd(p_init, "steady_state: P_init");
  Matrix p = symmetrized(p_init);
  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix next = riccati_step(sys, p, xi);
    residual = spectral_norm(next - p) / std::max(1.0, spectral_norm(p));
    if (residual <= tol) {
      // Report the residual of the returned iterate itself.
      const Matrix check = riccati_step(sys, next, xi);
      const double final_residual =
          spectral_norm(check - next) / std::max(1.0, spectral_norm(next));
      return {next, it, final_residual};
    }
    p = next;
  }
  throw NoConvergence("steady_state: no fixed point within max_iter", p, residual,
                      max_iter);
}

bool detectability_check(const Matrix& a, const std::vector<Vector>& c_rows,
                         double rank_tol) {
  const int d = static_cast<int>(a.rows());
  if (a.rows() != a.cols()) throw DimMismatch("detectability_check: A must be square");
  for (const Vector& row : c_rows) {
    if (row.size() != d) throw DimMismatch("detectability_check: C row length != d");
  }

  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw InvalidMatrix("detectability_check: eigensolver failed");
  }

  const int m = static_cast<int>(c_rows.size());
  Eigen::MatrixXcd pbh(d + m, d);
  for (int k = 0; k < d; ++k) {
    const std::complex<double> lam = es.eigenvalues()(k);
    if (std::abs(lam) < 1.0) continue;  // stable mode: nothing to observe
    pbh.topRows(d) = lam * Eigen::MatrixXcd::Identity(d, d) - a.cast<std::complex<double>>();
    for (int i = 0; i < m; ++i) {
      pbh.row(d + i) = c_rows[i].transpose().cast<std::complex<double>>();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pbh);
    qr.setThreshold(rank_tol);
    if (qr.rank() < d) return false;
  }
  return true;
}

std::pair<SteadyStateResult, SteadyStateResult> ss_bounds_aw(
    const LtiSystem& sys, const AwParams& params, const Matrix& ez, double tol,
    int max_iter) {
  const auto [lower, upper] = aw_bounds(params, ez);
  const Matrix p0 = Matrix::Zero(sys.dim(), sys.dim());
  SteadyStateResult ss_upper = steady_state(sys, lower.matrix, p0, tol, max_iter);
  SteadyStateResult ss_lower = steady_state(sys, upper.matrix, p0, tol, max_iter);
  return {ss_upper, ss_lower};
}

std::pair<SteadyStateResult, SteadyStateResult> ss_bounds_gen(
    const LtiSystem& sys, const GenParams& params, const Matrix& ez, double tol,
    int max_iter) {
  const auto [lower, upper] = gen_bounds(params, ez);
  if (lower.trivial) {
    throw TrivialLowerScale(
        "ss_bounds_gen: (1 - r eps) gamma <= 0, upper bound undefined");
  }
  const Matrix p0 = Matrix::Zero(sys.dim(), sys.dim());
  SteadyStateResult ss_upper = steady_state(sys, lower.matrix, p0, tol, max_iter);
  SteadyStateResult ss_lower = steady_state(sys, upper.matrix, p0, tol, max_iter);
  return {ss_upper, ss_lower};
}

}  // namespace mcss
