#pragma once

#include <utility>
#include <vector>

#include "mcss/ensemble.hpp"
#include "mcss/errors.hpp"
#include "mcss/symmat.hpp"
#include "mcss/types.hpp"

namespace mcss {

/// Parameters of the two-sided concentration inequality. Constructed through
/// make_aw_params so the equality gamma * eps^2 / rho = 4 ln(2d / delta) and
/// the boundedness certificate Z_i <= rho E[Z] hold by construction.
struct AwParams {
  int d = 0;
  double delta_bar = 0.0;
  int gamma = 0;
  double rho_bar = 1.0;
  double epsilon_bar = 0.0;
  SamplingDistribution p;
};

/// Parameters of the refined one-sided inequalities; zeta in [0, 1] is the
/// refinement factor, and r * gamma * eps^2 / rho = 4 ln(d / delta) with
/// r = 1 - zeta^2 / rho.
struct GenParams {
  int d = 0;
  double delta = 0.0;
  int gamma = 0;
  double rho = 1.0;
  double epsilon = 0.0;
  SamplingDistribution p;
  double zeta = 0.0;
};

enum class BoundSide { lower, upper };

/// A scaled multiple of E[Z] bounding the sampled information sum on one
/// side. trivial marks a non-positive scale (vacuous as a lower bound).
struct SdBound {
  Matrix matrix;
  double scale = 0.0;
  double confidence = 0.0;
  BoundSide side = BoundSide::lower;
  bool two_sided = false;
  bool trivial = false;
};

/// Finite-support distribution over symmetric matrices; the appendix oracles
/// evaluate expectations exactly over this support.
struct FiniteMatrixDistribution {
  std::vector<Matrix> support;
  Vector probs;

  int size() const { return static_cast<int>(support.size()); }
  Matrix mean() const;
};

enum class TailSign { minus, plus };

/// r(rho, zeta) = 1 - zeta^2 / rho; undefined at rho = zeta^2.
double r_factor(double rho, double zeta);

/// eps solved from gamma * eps^2 / rho = 4 ln(2d / delta); must land in
/// (0, 1) or the draw budget is below the sample complexity.
double solve_epsilon_aw(int d, double delta_bar, int gamma, double rho_bar);

/// eps solved from r * gamma * eps^2 / rho = 4 ln(d / delta); must land in
/// (0, 2].
double solve_epsilon_gen(int d, double delta, int gamma, double rho, double zeta);

/// Minimum draw count for the two-sided inequality: 4 rho ln(2d / delta).
double sample_complexity_aw(int d, double delta_bar, double rho_bar);

/// Minimum draw count for the refined inequalities, as printed:
/// rho^2 / (rho - zeta^2) * 2 ln(d / delta). Note this is conservative by a
/// factor of two against the exact eps <= 2 feasibility threshold of the
/// parameter equality; solve_epsilon_gen enforces the exact threshold.
double sample_complexity_gen(int d, double delta, double rho, double zeta);

/// The lower refined bound is non-trivial iff gamma strictly exceeds
/// (rho - zeta^2) * 4 ln(d / delta).
double nontriviality_threshold(int d, double delta, double rho, double zeta);

AwParams make_aw_params(const SensorPool& pool, const SamplingDistribution& p,
                        double delta_bar, int gamma, double rho_bar);
GenParams make_gen_params(const SensorPool& pool, const SamplingDistribution& p,
                          double delta, int gamma, double rho, double zeta);

/// Two-sided envelope (1 -+ eps) gamma E[Z] at joint confidence 1 - delta.
/// Returned as (lower, upper).
std::pair<SdBound, SdBound> aw_bounds(const AwParams& params, const Matrix& ez);

/// One-sided envelopes (1 -+ r eps) gamma E[Z], each at confidence 1 - delta.
/// The lower bound is returned even when trivial, flagged.
std::pair<SdBound, SdBound> gen_bounds(const GenParams& params, const Matrix& ez);

/// Chernoff-style tail bound d e^{-lambda t} prod_i ||E[e^{-+lambda X_i}]||
/// for the sum of gamma i.i.d. copies, expectations exact over the support.
/// TailSign::minus bounds P[-S ! <= t I], TailSign::plus bounds P[S ! <= t I].
double master_tail_rhs(const FiniteMatrixDistribution& dist, int gamma,
                       double lambda, double t, TailSign sign);

/// Checks ||E[e^{+-lambda X}]|| <= e^{lambda^2 rho_tilde} for the whitened,
/// centered ensemble X = (Y - E[Y]) / rho, rho_tilde = 1/rho - zeta^2/rho^2.
bool mgf_bound_check(const SensorPool& pool, const SamplingDistribution& p,
                     double rho, double zeta, double lambda);

/// ||e^X|| equals e^{||X||} for p.s.d. X, within 1e-9 relative.
bool exp_identity_check(const Matrix& x);

/// ||Y_i - E[Y]|| <= rho over the whole support, given 0 <= Y_i <= rho I.
bool centered_norm_check(const FiniteMatrixDistribution& dist, double rho);

/// Congruence by E[Z]^{+/2}: support {E[Z]^{+/2} Z_i E[Z]^{+/2}} over the
/// supported sensors. Verifies the projector and pseudo-inverse identities
/// behind the construction to 1e-9 and throws RangeViolation when a supported
/// sensor escapes range(E[Z]).
FiniteMatrixDistribution whiten(const SensorPool& pool, const SamplingDistribution& p,
                                double rank_tol = kRankTol);

}  // namespace mcss
