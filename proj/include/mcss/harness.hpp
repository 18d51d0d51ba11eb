#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcss/ensemble.hpp"
#include "mcss/kalman.hpp"
#include "mcss/types.hpp"

namespace mcss {

enum class DistributionMode { uniform, min_rho };

/// Settings shared by the Monte Carlo drivers. All randomness flows from
/// seed; trials are keyed by (seed, trial index) so any parallel schedule
/// reproduces the same numbers.
struct TrialSettings {
  int trials = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  double order_tol = 1e-8;          // Loewner comparisons
  double ss_tol = kSteadyStateTol;  // Riccati convergence
  int max_iter = kSteadyStateMaxIter;
  // Fraction of non-converged trials tolerated before the run is rejected.
  double exclusion_budget = 1e-3;
};

struct CoverageConfig {
  int gamma = 240;
  double delta = 0.05;      // per-side confidence, refined bounds
  double delta_bar = 0.05;  // joint confidence, two-sided bound
  double zeta = 0.0;
  TrialSettings run;
};

/// Empirical frequencies of every concentration event plus the worst-case
/// performance statistics, aggregated in trial-index order.
struct CoverageReport {
  int n_trials = 0;
  int excluded = 0;
  double freq_lower = 0.0;
  double freq_upper = 0.0;
  double freq_two_sided = 0.0;
  double freq_ss_lower = 0.0;
  double freq_ss_upper = 0.0;
  double freq_ss_two_sided = 0.0;
  // Trials where a sum event held but the implied covariance ordering did
  // not; the comparison argument says this must never happen.
  int cond_violations = 0;
  double lam_p_mean = 0.0;
  double lam_p_std = 0.0;
  double rho = 0.0;
  double epsilon_bar = 0.0;
  double epsilon = 0.0;
  double r = 0.0;
  double confidence = 0.0;
};

CoverageReport run_coverage(const LtiSystem& sys, const SensorPool& pool,
                            const SamplingDistribution& p, const CoverageConfig& cfg);

/// One (gamma, zeta) cell of a sweep. Fields are empty when the cell is
/// infeasible; note records why.
struct SweepRow {
  int gamma = 0;
  double zeta = 0.0;
  std::optional<double> epsilon;
  std::optional<double> r;
  std::optional<double> lam_u_gen;
  std::optional<double> lam_u_aw;
  double lam_p_mean = 0.0;
  double lam_p_std = 0.0;
  std::optional<double> coverage_lower;
  std::optional<double> coverage_upper;
  std::optional<bool> lower_trivial;
  std::string note;
};

struct SweepConfig {
  std::vector<int> gammas;
  std::vector<double> zetas;
  double delta = 0.05;
  TrialSettings run;
};

/// Rows for every (gamma, zeta) pair, gammas outer, zetas inner. Trials are
/// shared across the zeta grid at fixed gamma.
std::vector<SweepRow> sweep_gamma(const LtiSystem& sys, const SensorPool& pool,
                                  const SamplingDistribution& p, const SweepConfig& cfg);

/// Single-gamma sweep over the zeta grid.
std::vector<SweepRow> sweep_zeta(const LtiSystem& sys, const SensorPool& pool,
                                 const SamplingDistribution& p, int gamma,
                                 const std::vector<double>& zetas, double delta,
                                 const TrialSettings& run);

/// CSV with header
/// gamma,zeta,epsilon,r,lam_U_gen,lam_U_aw,lam_P_mean,lam_P_std,coverage_lower,coverage_upper,lower_trivial
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// uniform: 1/eta each. min_rho: multiplicative-weights descent on the
/// boundedness certificate max_i lambda_max(E[Z]^{+/2} Z_i E[Z]^{+/2}),
/// returning the best iterate (never worse than uniform). Falls back to
/// uniform if the search degenerates.
SamplingDistribution heuristic_distribution(const SensorPool& pool,
                                            DistributionMode mode, int iters = 2000);

struct InstanceSpec {
  int d = 3;
  int eta = 420;
  double sigma2 = 0.5;
  double q_scale = 0.5;
};

struct Instance {
  LtiSystem system;
  SensorPool pool;
  int rejections = 0;
};

/// Random instance: A and sensor entries i.i.d. uniform(0,1), Q = q_scale I.
/// Redraws (up to 1000 attempts) until every single-sensor pair (A, c_i) is
/// detectable and E[Z] under the uniform distribution is p.d.
Instance build_instance(const InstanceSpec& spec, std::uint64_t seed);

/// The d=3, eta=420, sigma2=0.5, Q=0.5 I configuration.
Instance build_fig1_instance(std::uint64_t seed);

}  // namespace mcss
