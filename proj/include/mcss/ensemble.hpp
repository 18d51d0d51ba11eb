#pragma once

#include <cstdint>
#include <vector>

#include "mcss/errors.hpp"
#include "mcss/symmat.hpp"
#include "mcss/types.hpp"

namespace mcss {

/// One candidate sensor: output map c and measurement noise variance.
struct Sensor {
  Vector c;
  double sigma2 = 1.0;
};

/// Ordered pool of candidate sensors over a d-dimensional state.
struct SensorPool {
  int d = 0;
  std::vector<Sensor> sensors;

  int size() const { return static_cast<int>(sensors.size()); }
};

void validate(const SensorPool& pool);

/// Point on the probability simplex driving replacement sampling.
class SamplingDistribution {
 public:
  explicit SamplingDistribution(Vector p);

  const Vector& probs() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_(i); }

  static SamplingDistribution uniform(int eta);

 private:
  Vector p_;
};

/// The indices (0-based) of gamma categorical draws, repeats allowed.
struct Selection {
  std::vector<int> indices;

  int gamma() const { return static_cast<int>(indices.size()); }
};

/// Information matrix sigma^{-2} c c^T contributed by one sensor.
Matrix info_matrix(const Sensor& s);

/// E[Z] = sum_i p_i Z_i.
Matrix expected_info(const SensorPool& pool, const SamplingDistribution& p);

/// gamma independent categorical draws. Deterministic in (seed, trial, draw
/// index); concurrent trials must use distinct trial indices.
Selection draw_selection(const SensorPool& pool, const SamplingDistribution& p,
                         int gamma, std::uint64_t seed, std::uint64_t trial = 0);

/// Sum of the drawn information matrices.
Matrix selection_sum(const SensorPool& pool, const Selection& sel);

/// Smallest rho with Z_i <= rho E[Z] over all supported sensors, computed as
/// the largest eigenvalue of E[Z]^{+/2} Z_i E[Z]^{+/2}. Always >= 1. Throws
/// Unbounded if a supported sensor escapes the range of E[Z].
double rho_min(const SensorPool& pool, const SamplingDistribution& p,
               double rank_tol = kRankTol);

/// Pool of eta sensors with i.i.d. uniform(0,1) c-entries and a shared noise
/// variance; deterministic per seed.
SensorPool random_pool(int d, int eta, double sigma2, std::uint64_t seed);

}  // namespace mcss
