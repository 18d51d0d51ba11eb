#pragma once

#include "mcss/errors.hpp"
#include "mcss/types.hpp"

namespace mcss {

// Scale-relative tolerances used throughout the eigendecomposition kernel.
// kPsdTol gates "is this matrix p.s.d."; kRankTol decides which eigenvalues
// count as zero when forming pseudo-inverses and range projectors.
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kRankTol = 1e-12;

/// Spectral factorization of a symmetric matrix, eigenvalues ascending,
/// eigenvectors orthonormal in the columns.
struct EigenDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

/// Exact symmetrization (M + M^T)/2. All kernel entry points run their input
/// through this so asymmetry cannot drift through repeated inversions.
Matrix symmetrized(const Matrix& m);

EigenDecomp eig_sym(const Matrix& m);

/// Loewner order test A <= B: smallest eigenvalue of (B - A) may dip below
/// zero by at most tol * max(1, ||B - A||).
bool loewner_leq(const Matrix& a, const Matrix& b, double tol);

double max_eig(const Matrix& m);
double min_eig(const Matrix& m);

/// Largest absolute eigenvalue.
double spectral_norm(const Matrix& m);

/// M^{+/2}: eigenvalues above rank_tol * lambda_max map to lambda^{-1/2},
/// the rest to zero, in the eigenbasis of M.
Matrix pinv_sqrt(const Matrix& m, double rank_tol = kRankTol);

/// Moore-Penrose pseudo-inverse of a p.s.d. matrix.
Matrix pinv_psd(const Matrix& m, double rank_tol = kRankTol);

/// M^{1/2} of a p.s.d. matrix (eigenvalues below the rank cutoff clamp to 0).
Matrix psd_sqrt(const Matrix& m, double rank_tol = kRankTol);

/// M M^+ = orthogonal projector onto range(M).
Matrix range_projector(const Matrix& m, double rank_tol = kRankTol);

/// e^M for symmetric M, exponentiated in the eigenbasis.
Matrix matrix_exp(const Matrix& m);

}  // namespace mcss
