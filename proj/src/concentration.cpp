#include "mcss/concentration.hpp"

#include <cmath>

namespace mcss {

namespace {

void check_common_scalars(int d, double delta, double rho) {
  if (d < 1) throw InvalidScalar("d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidScalar("delta must lie in (0,1)");
  if (!(rho >= 1.0)) throw InvalidScalar("rho must be >= 1");
}

// Certificate check Z_i <= rho E[Z] over the supported sensors.
void check_boundedness(const SensorPool& pool, const SamplingDistribution& p,
                       double rho, const Matrix& ez) {
  for (int i = 0; i < pool.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    if (!loewner_leq(info_matrix(pool.sensors[i]), rho * ez, 1e-8)) {
      throw InvalidScalar("rho does not certify Z_i <= rho E[Z] on the support");
    }
  }
}

}  // namespace

Matrix FiniteMatrixDistribution::mean() const {
  if (support.empty()) throw InvalidScalar("distribution: empty support");
  Matrix m = Matrix::Zero(support.front().rows(), support.front().cols());
  for (int i = 0; i < size(); ++i) m += probs(i) * support[i];
  return symmetrized(m);
}

double r_factor(double rho, double zeta) {
  if (rho == 0.0) throw Undefined("r_factor: rho must be nonzero");
  return 1.0 - zeta * zeta / rho;
}

double solve_epsilon_aw(int d, double delta_bar, int gamma, double rho_bar) {
  check_common_scalars(d, delta_bar, rho_bar);
  if (gamma < 1) throw InvalidBudget("solve_epsilon_aw: gamma must be >= 1");
  const double eps = std::sqrt(4.0 * rho_bar * std::log(2.0 * d / delta_bar) / gamma);
  if (!(eps < 1.0)) {
    throw InsufficientSamples("solve_epsilon_aw: gamma below the sample complexity");
  }
  return eps;
}

double solve_epsilon_gen(int d, double delta, int gamma, double rho, double zeta) {
  check_common_scalars(d, delta, rho);
  if (gamma < 1) throw InvalidBudget("solve_epsilon_gen: gamma must be >= 1");
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw InvalidRefinement("solve_epsilon_gen: zeta must lie in [0,1]");
  }
  if (!(rho > zeta * zeta)) {
    throw InvalidRefinement("solve_epsilon_gen: requires rho > zeta^2");
  }
  const double r = r_factor(rho, zeta);
  const double eps = std::sqrt(4.0 * rho * std::log(static_cast<double>(d) / delta) /
                               (r * gamma));
  if (!(eps <= 2.0)) {
    throw InsufficientSamples("solve_epsilon_gen: gamma below the sample complexity");
  }
  return eps;
}

double sample_complexity_aw(int d, double delta_bar, double rho_bar) {
  check_common_scalars(d, delta_bar, rho_bar);
  return 4.0 * rho_bar * std::log(2.0 * d / delta_bar);
}

double sample_complexity_gen(int d, double delta, double rho, double zeta) {
  check_common_scalars(d, delta, rho);
  if (!(rho > zeta * zeta)) {
    throw InvalidRefinement("sample_complexity_gen: requires rho > zeta^2");
  }
  return rho * rho / (rho - zeta * zeta) * 2.0 *
         std::log(static_cast<double>(d) / delta);
}

double nontriviality_threshold(int d, double delta, double rho, double zeta) {
  check_common_scalars(d, delta, rho);
  return (rho - zeta * zeta) * 4.0 * std::log(static_cast<double>(d) / delta);
}

AwParams make_aw_params(const SensorPool& pool, const SamplingDistribution& p,
                        double delta_bar, int gamma, double rho_bar) {
  const double eps = solve_epsilon_aw(pool.d, delta_bar, gamma, rho_bar);
  check_boundedness(pool, p, rho_bar, expected_info(pool, p));
  return {pool.d, delta_bar, gamma, rho_bar, eps, p};
}

GenParams make_gen_params(const SensorPool& pool, const SamplingDistribution& p,
                          double delta, int gamma, double rho, double zeta) {
  const double eps = solve_epsilon_gen(pool.d, delta, gamma, rho, zeta);
  check_boundedness(pool, p, rho, expected_info(pool, p));
  return {pool.d, delta, gamma, rho, eps, p, zeta};
}

std::pair<SdBound, SdBound> aw_bounds(const AwParams& params, const Matrix& ez) {
  if (ez.rows() != params.d || ez.cols() != params.d) {
    throw DimMismatch("aw_bounds: E[Z] dimension != d");
  }
  const double g = static_cast<double>(params.gamma);
  const double lo = (1.0 - params.epsilon_bar) * g;
  const double hi = (1.0 + params.epsilon_bar) * g;
  SdBound lower{symmetrized(lo * ez), lo, 1.0 - params.delta_bar,
                BoundSide::lower, true, lo <= 0.0};
  SdBound upper{symmetrized(hi * ez), hi, 1.0 - params.delta_bar,
                BoundSide::upper, true, false};
  return {lower, upper};
}

std::pair<SdBound, SdBound> gen_bounds(const GenParams& params, const Matrix& ez) {
  if (ez.rows() != params.d || ez.cols() != params.d) {
    throw DimMismatch("gen_bounds: E[Z] dimension != d");
  }
  if (!(params.rho > params.zeta * params.zeta)) {
    throw InvalidRefinement("gen_bounds: requires rho > zeta^2");
  }
  const double r = r_factor(params.rho, params.zeta);
  const double g = static_cast<double>(params.gamma);
  const double lo = (1.0 - r * params.epsilon) * g;
  const double hi = (1.0 + r * params.epsilon) * g;
  SdBound lower{symmetrized(lo * ez), lo, 1.0 - params.delta,
                BoundSide::lower, false, lo <= 0.0};
  SdBound upper{symmetrized(hi * ez), hi, 1.0 - params.delta,
                BoundSide::upper, false, false};
  return {lower, upper};
}

double master_tail_rhs(const FiniteMatrixDistribution& dist, int gamma,
                       double lambda, double t, TailSign sign) {
  if (!(lambda > 0.0) || !(t > 0.0)) {
    throw InvalidScalar("master_tail_rhs: lambda and t must be > 0");
  }
  if (gamma < 1) throw InvalidBudget("master_tail_rhs: gamma must be >= 1");
  if (dist.support.empty()) throw InvalidScalar("master_tail_rhs: empty support");

  const double s = sign == TailSign::minus ? -lambda : lambda;
  const int d = static_cast<int>(dist.support.front().rows());
  Matrix mgf = Matrix::Zero(d, d);
  for (int i = 0; i < dist.size(); ++i) {
    if (dist.probs(i) > 0.0) mgf += dist.probs(i) * matrix_exp(s * dist.support[i]);
  }
  // Identical factors for i.i.d. copies.
  return d * std::exp(-lambda * t) * std::pow(spectral_norm(mgf), gamma);
}

bool mgf_bound_check(const SensorPool& pool, const SamplingDistribution& p,
                     double rho, double zeta, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidScalar("mgf_bound_check: lambda must lie in [0,1]");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw HypothesisViolated("mgf_bound_check: zeta must lie in [0,1]");
  }
  if (!(rho >= zeta * zeta)) {
    throw HypothesisViolated("mgf_bound_check: requires rho >= zeta^2");
  }

  const FiniteMatrixDistribution whitened = whiten(pool, p);
  const Matrix ey = whitened.mean();
  const int d = static_cast<int>(ey.rows());

  // Y <= rho I on the support; E[Y] is a projector, so the sandwich
  // zeta I_range <= E[Y] <= I_range reduces to zeta <= 1, checked above.
  for (const Matrix& y : whitened.support) {
    if (!loewner_leq(y, rho * Matrix::Identity(d, d), 1e-9)) {
      throw HypothesisViolated("mgf_bound_check: rho does not dominate the support");
    }
  }

  const double rho_tilde = 1.0 / rho - zeta * zeta / (rho * rho);
  const double rhs = std::exp(lambda * lambda * rho_tilde);
  for (double s : {-lambda, lambda}) {
    Matrix mgf = Matrix::Zero(d, d);
    for (int i = 0; i < whitened.size(); ++i) {
      const Matrix x = (whitened.support[i] - ey) / rho;
      mgf += whitened.probs(i) * matrix_exp(s * x);
    }
    if (spectral_norm(mgf) > rhs + 1e-9 * std::max(1.0, rhs)) return false;
  }
  return true;
}

bool exp_identity_check(const Matrix& x) {
  if (min_eig(x) < -kPsdTol * std::max(1.0, max_eig(x))) {
    throw NotPsd("exp_identity_check: X must be p.s.d.");
  }
  const double lhs = spectral_norm(matrix_exp(x));
  const double rhs = std::exp(spectral_norm(x));
  return std::abs(lhs - rhs) <= 1e-9 * rhs;
}

bool centered_norm_check(const FiniteMatrixDistribution& dist, double rho) {
  if (!(rho > 0.0)) throw InvalidScalar("centered_norm_check: rho must be > 0");
  if (dist.support.empty()) throw InvalidScalar("centered_norm_check: empty support");
  const int d = static_cast<int>(dist.support.front().rows());
  const Matrix rho_id = rho * Matrix::Identity(d, d);
  for (const Matrix& y : dist.support) {
    if (min_eig(y) < -kPsdTol * std::max(1.0, max_eig(y))) {
      throw HypothesisViolated("centered_norm_check: support point not p.s.d.");
    }
    if (!loewner_leq(y, rho_id, 1e-9)) {
      throw HypothesisViolated("centered_norm_check: support point exceeds rho I");
    }
  }
  const Matrix ey = dist.mean();
  for (const Matrix& y : dist.support) {
    if (spectral_norm(y - ey) > rho + 1e-9 * std::max(1.0, rho)) return false;
  }
  return true;
}

FiniteMatrixDistribution whiten(const SensorPool& pool, const SamplingDistribution& p,
                                double rank_tol) {
  if (p.size() != pool.size()) throw DimMismatch("whiten: |p| != number of sensors");

  const Matrix ez = expected_info(pool, p);
  const Matrix white = pinv_sqrt(ez, rank_tol);
  const Matrix root = psd_sqrt(ez, rank_tol);
  const Matrix proj = range_projector(ez, rank_tol);
  const int d = pool.d;
  const Matrix off_range = Matrix::Identity(d, d) - proj;

  // Pseudo-inverse identities behind the congruence; all exact in theory.
  const auto close = [](const Matrix& a, const Matrix& b) {
    return spectral_norm(a - b) <= 1e-9 * std::max(1.0, spectral_norm(b));
  };
  if (!close(white * ez * white, proj) || !close(root * white, proj) ||
      !close(white * root, proj)) {
    throw NumericalError("whiten: projector identities failed");
  }

  FiniteMatrixDistribution out;
  std::vector<double> probs;
  for (int i = 0; i < pool.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    const Matrix zi = info_matrix(pool.sensors[i]);
    const double zi_norm = spectral_norm(zi);
    if (spectral_norm(off_range * zi * off_range) > 1e-9 * zi_norm) {
      throw RangeViolation("whiten: a supported sensor escapes range(E[Z])");
    }
    if (zi_norm > 0.0 && !close(proj * zi * proj, zi)) {
      throw RangeViolation("whiten: Z_i != proj Z_i proj on the support");
    }
    out.support.push_back(symmetrized(white * zi * white));
    probs.push_back(p[i]);
  }
  out.probs = Eigen::Map<const Vector>(probs.data(), static_cast<int>(probs.size()));

  // E[Y] must coincide with the range projector of E[Z].
  if (!close(out.mean(), proj)) {
    throw NumericalError("whiten: E[Y] differs from the range projector");
  }
  return out;
}

}  // namespace mcss
