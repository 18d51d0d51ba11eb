#pragma once

#include <utility>
#include <vector>

#include "mcss/concentration.hpp"
#include "mcss/errors.hpp"
#include "mcss/types.hpp"

namespace mcss {

/// Discrete-time LTI model x+ = A x + w with p.d. process noise covariance Q.
struct LtiSystem {
  Matrix A;
  Matrix Q;

  int dim() const { return static_cast<int>(A.rows()); }
};

void validate(const LtiSystem& sys);

struct SteadyStateResult {
  Matrix matrix;
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr double kSteadyStateTol = 1e-10;
inline constexpr int kSteadyStateMaxIter = 10000;

/// One covariance update with information matrix Xi:
/// f(Lambda, Xi) = ((A Lambda A^T + Q)^{-1} + Xi)^{-1}.
/// Inversions go through the symmetric eigendecomposition so symmetry
/// survives long fixed-point iterations.
Matrix f_map(const LtiSystem& sys, const Matrix& lambda, const Matrix& xi);

/// Filtered-covariance recursion step; identical to f_map, named for the
/// role it plays in the covariance recursion.
Matrix riccati_step(const LtiSystem& sys, const Matrix& p, const Matrix& xi);

/// Fixed point of the covariance recursion, iterated from p_init until the
/// relative residual ||f(P) - P|| / max(1, ||P||) drops below tol.
SteadyStateResult steady_state(const LtiSystem& sys, const Matrix& xi,
                               const Matrix& p_init, double tol = kSteadyStateTol,
                               int max_iter = kSteadyStateMaxIter);

/// PBH test: rank [lambda I - A; C] == d at every eigenvalue of A with
/// |lambda| >= 1 (marginal modes count as unstable).
bool detectability_check(const Matrix& a, const std::vector<Vector>& c_rows,
                         double rank_tol = 1e-9);

/// Steady-state envelope from the two-sided inequality: upper bound from
/// Xi = (1 - eps) gamma E[Z], lower from (1 + eps) gamma E[Z]. Certifies
/// P[lower <= P <= upper] >= 1 - delta_bar.
std::pair<SteadyStateResult, SteadyStateResult> ss_bounds_aw(
    const LtiSystem& sys, const AwParams& params, const Matrix& ez,
    double tol = kSteadyStateTol, int max_iter = kSteadyStateMaxIter);

/// Steady-state envelope from the refined one-sided inequalities; each side
/// holds at confidence 1 - delta. Refuses a non-positive lower information
/// scale instead of returning a vacuous upper bound.
std::pair<SteadyStateResult, SteadyStateResult> ss_bounds_gen(
    const LtiSystem& sys, const GenParams& params, const Matrix& ez,
    double tol = kSteadyStateTol, int max_iter = kSteadyStateMaxIter);

}  // namespace mcss
