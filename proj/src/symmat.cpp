#include "mcss/symmat.hpp"

#include <cmath>

namespace mcss {

namespace {

void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) {
    throw InvalidMatrix(std::string(where) + ": non-finite entries");
  }
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw InvalidMatrix(std::string(where) + ": expected a square matrix");
  }
}

// Eigenvalue threshold below which a p.s.d. matrix is treated as rank
// deficient. Negative eigenvalues past the same cutoff mean the input was
// not p.s.d. at all.
double rank_cutoff(const Vector& eigenvalues, double rank_tol) {
  const double lam_max = eigenvalues.size() ? eigenvalues.maxCoeff() : 0.0;
  return rank_tol * std::max(lam_max, 0.0);
}

EigenDecomp psd_decomp(const Matrix& m, double rank_tol, const char* where) {
  EigenDecomp d = eig_sym(m);
  const double cutoff = rank_cutoff(d.eigenvalues, rank_tol);
  if (d.eigenvalues.minCoeff() < -cutoff) {
    throw NotPsd(std::string(where) + ": eigenvalue below -rank_tol * lambda_max");
  }
  return d;
}

}  // namespace

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

EigenDecomp eig_sym(const Matrix& m) {
  require_finite(m, "eig_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m));
  if (solver.info() != Eigen::Success) {
    throw InvalidMatrix("eig_sym: eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool loewner_leq(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimMismatch("loewner_leq: dimension mismatch");
  }
  if (tol < 0.0) {
    throw InvalidScalar("loewner_leq: tol must be >= 0");
  }
  const Matrix diff = symmetrized(b - a);
  const EigenDecomp d = eig_sym(diff);
  const double norm = d.eigenvalues.cwiseAbs().maxCoeff();
  return d.eigenvalues.minCoeff() >= -tol * std::max(1.0, norm);
}

double max_eig(const Matrix& m) { return eig_sym(m).eigenvalues.maxCoeff(); }

double min_eig(const Matrix& m) { return eig_sym(m).eigenvalues.minCoeff(); }

double spectral_norm(const Matrix& m) {
  return eig_sym(m).eigenvalues.cwiseAbs().maxCoeff();
}

Matrix pinv_sqrt(const Matrix& m, double rank_tol) {
  EigenDecomp d = psd_decomp(m, rank_tol, "pinv_sqrt");
  const double cutoff = rank_cutoff(d.eigenvalues, rank_tol);
  Vector mapped = d.eigenvalues.unaryExpr(
      [cutoff](double lam) { return lam > cutoff ? 1.0 / std::sqrt(lam) : 0.0; });
  return symmetrized(d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose());
}

Matrix pinv_psd(const Matrix& m, double rank_tol) {
  EigenDecomp d = psd_decomp(m, rank_tol, "pinv_psd");
  const double cutoff = rank_cutoff(d.eigenvalues, rank_tol);
  Vector mapped = d.eigenvalues.unaryExpr(
      [cutoff](double lam) { return lam > cutoff ? 1.0 / lam : 0.0; });
  return symmetrized(d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose());
}

Matrix psd_sqrt(const Matrix& m, double rank_tol) {
  EigenDecomp d = psd_decomp(m, rank_tol, "psd_sqrt");
  const double cutoff = rank_cutoff(d.eigenvalues, rank_tol);
  Vector mapped = d.eigenvalues.unaryExpr(
      [cutoff](double lam) { return lam > cutoff ? std::sqrt(lam) : 0.0; });
  return symmetrized(d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose());
}

Matrix range_projector(const Matrix& m, double rank_tol) {
  EigenDecomp d = psd_decomp(m, rank_tol, "range_projector");
  const double cutoff = rank_cutoff(d.eigenvalues, rank_tol);
  Vector mapped = d.eigenvalues.unaryExpr(
      [cutoff](double lam) { return lam > cutoff ? 1.0 : 0.0; });
  return symmetrized(d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose());
}

Matrix matrix_exp(const Matrix& m) {
  EigenDecomp d = eig_sym(m);
  Vector mapped = d.eigenvalues.unaryExpr([](double lam) { return std::exp(lam); });
  return symmetrized(d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose());
}

}  // namespace mcss
