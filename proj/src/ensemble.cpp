#include "mcss/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "mcss/rng.hpp"

namespace mcss {

void validate(const SensorPool& pool) {
  if (pool.d < 1) throw InvalidBudget("pool: state dimension must be >= 1");
  if (pool.sensors.empty()) throw InvalidBudget("pool: needs at least one sensor");
  for (const Sensor& s : pool.sensors) {
    if (s.c.size() != pool.d) throw DimMismatch("pool: sensor c-vector length != d");
    if (!(s.sigma2 > 0.0)) throw InvalidSensor("pool: sigma2 must be > 0");
    if (!s.c.allFinite()) throw InvalidSensor("pool: non-finite sensor entries");
  }
}

SamplingDistribution::SamplingDistribution(Vector p) : p_(std::move(p)) {
  if (p_.size() < 1) throw InvalidScalar("distribution: empty");
  if (!p_.allFinite() || p_.minCoeff() < 0.0) {
    throw InvalidScalar("distribution: entries must be finite and >= 0");
  }
  if (std::abs(p_.sum() - 1.0) > 1e-12) {
    throw InvalidScalar("distribution: entries must sum to 1 within 1e-12");
  }
}

SamplingDistribution SamplingDistribution::uniform(int eta) {
  if (eta < 1) throw InvalidBudget("uniform distribution: eta must be >= 1");
  Vector p = Vector::Constant(eta, 1.0 / eta);
  // Make the simplex invariant exact even when 1/eta does not round-trip.
  p(eta - 1) += 1.0 - p.sum();
  return SamplingDistribution(p);
}

Matrix info_matrix(const Sensor& s) {
  if (!(s.sigma2 > 0.0)) throw InvalidSensor("info_matrix: sigma2 must be > 0");
  if (!s.c.allFinite()) throw InvalidSensor("info_matrix: non-finite c");
  return (s.c * s.c.transpose()) / s.sigma2;
}

Matrix expected_info(const SensorPool& pool, const SamplingDistribution& p) {
  if (p.size() != pool.size()) {
    throw DimMismatch("expected_info: |p| != number of sensors");
  }
  Matrix ez = Matrix::Zero(pool.d, pool.d);
  for (int i = 0; i < pool.size(); ++i) {
    if (p[i] > 0.0) ez += p[i] * info_matrix(pool.sensors[i]);
  }
  return symmetrized(ez);
}

Selection draw_selection(const SensorPool& pool, const SamplingDistribution& p,
                         int gamma, std::uint64_t seed, std::uint64_t trial) {
  if (gamma < 1) throw InvalidBudget("draw_selection: gamma must be >= 1");
  if (p.size() != pool.size()) {
    throw DimMismatch("draw_selection: |p| != number of sensors");
  }
  const int eta = pool.size();
  std::vector<double> cum(eta);
  double acc = 0.0;
  for (int i = 0; i < eta; ++i) {
    acc += p[i];
    cum[i] = acc;
  }
  const double total = cum.back();

  Selection sel;
  sel.indices.resize(gamma);
  for (int k = 0; k < gamma; ++k) {
    const double u = rng::uniform01(seed, trial, static_cast<std::uint64_t>(k)) * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    int idx = static_cast<int>(it - cum.begin());
    sel.indices[k] = std::min(idx, eta - 1);
  }
  return sel;
}

Matrix selection_sum(const SensorPool& pool, const Selection& sel) {
  Matrix sum = Matrix::Zero(pool.d, pool.d);
  for (int idx : sel.indices) {
    if (idx < 0 || idx >= pool.size()) {
      throw IndexOutOfRange("selection_sum: index outside the pool");
    }
    sum += info_matrix(pool.sensors[idx]);
  }
  return symmetrized(sum);
}

double rho_min(const SensorPool& pool, const SamplingDistribution& p, double rank_tol) {
  if (p.size() != pool.size()) throw DimMismatch("rho_min: |p| != number of sensors");
  if (!(p.probs().maxCoeff() > 0.0)) throw InvalidScalar("rho_min: empty support");

  const Matrix ez = expected_info(pool, p);
  const Matrix white = pinv_sqrt(ez, rank_tol);
  const Matrix proj = range_projector(ez, rank_tol);
  const Matrix off_range = Matrix::Identity(pool.d, pool.d) - proj;

  double rho = 1.0;
  for (int i = 0; i < pool.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    const Matrix zi = info_matrix(pool.sensors[i]);
    const double zi_norm = spectral_norm(zi);
    const double escaped = spectral_norm(off_range * zi * off_range);
    if (escaped > 1e-9 * zi_norm) {
      throw Unbounded("rho_min: a supported sensor escapes range(E[Z])");
    }
    rho = std::max(rho, max_eig(white * zi * white));
  }
  return rho;
}

SensorPool random_pool(int d, int eta, double sigma2, std::uint64_t seed) {
  if (d < 1 || eta < 1) throw InvalidBudget("random_pool: d and eta must be >= 1");
  if (!(sigma2 > 0.0)) throw InvalidSensor("random_pool: sigma2 must be > 0");
  SensorPool pool;
  pool.d = d;
  pool.sensors.reserve(eta);
  for (int i = 0; i < eta; ++i) {
    Vector c(d);
    for (int k = 0; k < d; ++k) {
      c(k) = rng::uniform01(seed, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(k));
    }
    pool.sensors.push_back({c, sigma2});
  }
  return pool;
}

}  // namespace mcss
