#include <cmath>
#include <doctest.h>

#include "mcss/concentration.hpp"
#include "mcss/rng.hpp"
#include "test_util.hpp"

using namespace mcss;
using testutil::random_psd;
using testutil::random_simplex;

namespace {

// Inverse-CDF draw from a finite matrix distribution, test-side sampler.
int draw_atom(const FiniteMatrixDistribution& dist, std::uint64_t seed,
              std::uint64_t trial, std::uint64_t k) {
  const double u = rng::uniform01(seed, trial * 131071ULL + k, 0x7ab1ULL);
  double acc = 0.0;
  for (int i = 0; i < dist.size(); ++i) {
    acc += dist.probs(i);
    if (u < acc) return i;
  }
  return dist.size() - 1;
}

FiniteMatrixDistribution psd_support_dist(int d, int n, std::uint64_t seed,
                                          double scale) {
  FiniteMatrixDistribution dist;
  for (int i = 0; i < n; ++i) {
    dist.support.push_back(random_psd(d, seed + 100 * i, scale));
  }
  dist.probs = random_simplex(n, seed).probs();
  return dist;
}

}  // namespace

TEST_CASE("r_factor values and the undefined diagonal") {
  CHECK(r_factor(3.0, 0.0) == 1.0);
  CHECK(r_factor(1.0, 1.0) == 0.0);
  CHECK(r_factor(4.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(r_factor(1.0, -1.0), Undefined);
}

TEST_CASE("solve_epsilon_aw: frozen value, monotonicity, threshold") {
  // sqrt(4 * 3 * ln(120) / 240), evaluated independently
  CHECK(solve_epsilon_aw(3, 0.05, 240, 3.0) ==
        doctest::Approx(0.4892592228452135).epsilon(1e-12));

  double prev = 1.0;
  for (int gamma : {60, 120, 240, 480, 10000}) {
    const double eps = solve_epsilon_aw(3, 0.05, gamma, 3.0);
    CHECK(eps < prev);
    prev = eps;
  }

  // kappa_bar = 12 ln(120) = 57.4499...: gamma at or below it must throw.
  CHECK_THROWS_AS(solve_epsilon_aw(3, 0.05, 40, 3.0), InsufficientSamples);
  CHECK_THROWS_AS(solve_epsilon_aw(3, 0.05, 57, 3.0), InsufficientSamples);
  CHECK_NOTHROW(solve_epsilon_aw(3, 0.05, 58, 3.0));
}

TEST_CASE("solve_epsilon_gen: reduction, frozen value, thresholds") {
  // zeta = 0 coincides with the two-sided solve under delta_bar = 2 delta.
  CHECK(solve_epsilon_gen(3, 0.025, 240, 3.0, 0.0) ==
        solve_epsilon_aw(3, 0.05, 240, 3.0));

  // sqrt(4 * 3 * ln(60) / ((2/3) * 240))
  CHECK(solve_epsilon_gen(3, 0.05, 240, 3.0, 1.0) ==
        doctest::Approx(0.5541442431052203).epsilon(1e-12));

  // eps <= 2 feasibility boundary: rho ln(d/delta) / r = 12.28 at zeta = 0.
  CHECK_THROWS_AS(solve_epsilon_gen(3, 0.05, 12, 3.0, 0.0), InsufficientSamples);
  CHECK_NOTHROW(solve_epsilon_gen(3, 0.05, 13, 3.0, 0.0));

  CHECK_THROWS_AS(solve_epsilon_gen(3, 0.05, 100, 1.0, 1.0), InvalidRefinement);
  CHECK_THROWS_AS(solve_epsilon_gen(3, 0.05, 100, 3.0, 1.5), InvalidRefinement);
}

TEST_CASE("aw_bounds: scales, confidence and the degenerate pool") {
  SensorPool pool = random_pool(2, 4, 1.0, 3);
  const SamplingDistribution p = SamplingDistribution::uniform(4);
  const Matrix ez = expected_info(pool, p);

  AwParams params{2, 0.1, 100, rho_min(pool, p), 0.25, p};
  const auto [lower, upper] = aw_bounds(params, ez);
  CHECK(lower.scale == doctest::Approx(75.0).epsilon(1e-15));
  CHECK(upper.scale == doctest::Approx(125.0).epsilon(1e-15));
  CHECK(lower.confidence == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(lower.two_sided);
  CHECK(upper.two_sided);
  CHECK_FALSE(lower.trivial);
  CHECK(spectral_norm(lower.matrix - 75.0 * ez) < 1e-12 * spectral_norm(ez));

  // epsilon -> 0: both scales approach gamma.
  params.epsilon_bar = 1e-12;
  const auto [lo0, hi0] = aw_bounds(params, ez);
  CHECK(lo0.scale == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(hi0.scale == doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("aw_bounds: single-atom support makes the event deterministic") {
  SensorPool pool;
  pool.d = 2;
  Vector c(2);
  c << 1.0, 0.5;
  pool.sensors = {{c, 0.5}};
  const SamplingDistribution p = SamplingDistribution::uniform(1);
  const Matrix ez = expected_info(pool, p);
  const AwParams params = make_aw_params(pool, p, 0.05, 100, 1.0);
  const auto [lower, upper] = aw_bounds(params, ez);
  const Matrix sum = selection_sum(pool, draw_selection(pool, p, 100, 5));
  CHECK(loewner_leq(lower.matrix, sum, 1e-9));
  CHECK(loewner_leq(sum, upper.matrix, 1e-9));
}

TEST_CASE("gen_bounds: zeta = 0 reproduces the two-sided envelope exactly") {
  const SensorPool pool = random_pool(3, 10, 0.5, 9);
  const SamplingDistribution p = SamplingDistribution::uniform(10);
  const Matrix ez = expected_info(pool, p);
  const double rho = rho_min(pool, p);

  for (int gamma : {400, 800, 1600}) {
    const GenParams gen = make_gen_params(pool, p, 0.05, gamma, rho, 0.0);
    if (gen.epsilon >= 1.0) continue;  // reduction argument needs eps in (0,1)
    const AwParams aw = make_aw_params(pool, p, 0.10, gamma, rho);
    const auto [glo, ghi] = gen_bounds(gen, ez);
    const auto [alo, ahi] = aw_bounds(aw, ez);
    CHECK(std::abs(glo.scale - alo.scale) <= 1e-12 * std::abs(alo.scale));
    CHECK(std::abs(ghi.scale - ahi.scale) <= 1e-12 * std::abs(ahi.scale));
    CHECK_FALSE(glo.two_sided);
    CHECK(alo.two_sided);
  }
}

TEST_CASE("gen_bounds: lower-bound triviality flips exactly at the threshold") {
  const SensorPool pool = random_pool(3, 8, 0.5, 31);
  const SamplingDistribution p = SamplingDistribution::uniform(8);
  const Matrix ez = expected_info(pool, p);
  const double rho = rho_min(pool, p);
  const double threshold = nontriviality_threshold(3, 0.05, rho, 0.5);
  const int flip = static_cast<int>(std::ceil(threshold));
  for (int gamma = flip - 3; gamma <= flip + 3; ++gamma) {
    if (gamma < 1) continue;
    try {
      const GenParams gen = make_gen_params(pool, p, 0.05, gamma, rho, 0.5);
      const auto [lower, upper] = gen_bounds(gen, ez);
      CHECK(lower.trivial == (gamma <= threshold));
      CHECK_FALSE(upper.trivial);
    } catch (const InsufficientSamples&) {
      CHECK(gamma < threshold);  // infeasible only below the flip
    }
  }
}

TEST_CASE("gen_bounds: r < 1 tightens both factors") {
  const double rho = 3.0;
  const double eps = solve_epsilon_gen(3, 0.05, 240, rho, 1.0);
  const double r = r_factor(rho, 1.0);
  CHECK(r == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(1.0 + r * eps < 1.0 + eps);
  CHECK(1.0 - r * eps > 1.0 - eps);
}

TEST_CASE("sample complexities: frozen values and the exact relation") {
  CHECK(sample_complexity_aw(3, 0.05, 3.0) ==
        doctest::Approx(57.44990091338455).epsilon(1e-12));
  CHECK(sample_complexity_aw(1, 0.5, 1.0) ==
        doctest::Approx(5.545177444479562).epsilon(1e-12));
  CHECK(sample_complexity_gen(3, 0.05, 3.0, 0.0) ==
        doctest::Approx(24.5660673733326).epsilon(1e-12));

  // kappa_bar - 2 kappa|zeta=0 = 4 rho ln 2, matched parameters.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 1 + static_cast<int>(rng::uniform01(seed, 1, 0) * 10);
    const double delta = 0.01 + 0.98 * rng::uniform01(seed, 2, 0);
    const double rho = 1.0 + 9.0 * rng::uniform01(seed, 3, 0);
    const double lhs = sample_complexity_aw(d, delta, rho) -
                       2.0 * sample_complexity_gen(d, delta, rho, 0.0);
    const double rhs = 4.0 * rho * std::log(2.0);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
  }

  // kappa is minimized at zeta = 0.
  const double at_zero = sample_complexity_gen(3, 0.05, 3.0, 0.0);
  for (double zeta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    CHECK(sample_complexity_gen(3, 0.05, 3.0, zeta) > at_zero);
  }
}

TEST_CASE("nontriviality_threshold: frozen value and the limit") {
  CHECK(nontriviality_threshold(3, 0.05, 3.0, 0.0) ==
        doctest::Approx(49.1321347466652).epsilon(1e-12));
  CHECK(nontriviality_threshold(3, 0.05, 3.0, std::sqrt(3.0) - 1e-8) <
        1e-6 * nontriviality_threshold(3, 0.05, 3.0, 0.0));
}

TEST_CASE("master_tail_rhs: deterministic and scalar closed forms") {
  FiniteMatrixDistribution zero;
  zero.support = {Matrix::Zero(3, 3)};
  zero.probs = Vector::Ones(1);
  CHECK(master_tail_rhs(zero, 5, 2.0, 1.5, TailSign::plus) ==
        doctest::Approx(3.0 * std::exp(-3.0)).epsilon(1e-12));

  FiniteMatrixDistribution scalar;
  scalar.support = {Matrix::Constant(1, 1, 0.7), Matrix::Constant(1, 1, -0.2)};
  Vector probs(2);
  probs << 0.3, 0.7;
  scalar.probs = probs;
  const double lambda = 0.9, t = 0.5;
  const double mgf = 0.3 * std::exp(lambda * 0.7) + 0.7 * std::exp(-lambda * 0.2);
  CHECK(master_tail_rhs(scalar, 1, lambda, t, TailSign::plus) ==
        doctest::Approx(std::exp(-lambda * t) * mgf).epsilon(1e-12));

  CHECK_THROWS_AS(master_tail_rhs(zero, 5, 0.0, 1.0, TailSign::plus), InvalidScalar);
  CHECK_THROWS_AS(master_tail_rhs(zero, 5, 1.0, -1.0, TailSign::minus), InvalidScalar);
}

TEST_CASE("master_tail_rhs: dominates the Monte Carlo tail frequency") {
  const SensorPool pool = random_pool(2, 5, 0.8, 77);
  const SamplingDistribution p = SamplingDistribution::uniform(5);
  const double rho = rho_min(pool, p);
  const FiniteMatrixDistribution y = whiten(pool, p);
  // Centered, scaled ensemble as used in the tail analysis.
  FiniteMatrixDistribution x = y;
  const Matrix ey = y.mean();
  for (Matrix& m : x.support) m = (m - ey) / rho;

  const int gamma = 25;
  const int trials = 10000;
  for (double t : {6.0, 8.0}) {
    for (TailSign sign : {TailSign::plus, TailSign::minus}) {
      const double bound = master_tail_rhs(x, gamma, 0.5, t, sign);
      int hits = 0;
      for (int trial = 0; trial < trials; ++trial) {
        Matrix s = Matrix::Zero(2, 2);
        for (int k = 0; k < gamma; ++k) {
          s += x.support[draw_atom(x, 4242, trial, k)];
        }
        if (sign == TailSign::plus) {
          hits += max_eig(s) > t;
        } else {
          hits += max_eig(-s) > t;
        }
      }
      CHECK(static_cast<double>(hits) / trials <= bound);
    }
  }
}

TEST_CASE("mgf_bound_check: trivial lambda, random pools, violated hypotheses") {
  const SensorPool pool = random_pool(3, 6, 0.5, 13);
  const SamplingDistribution p = SamplingDistribution::uniform(6);
  const double rho = rho_min(pool, p);

  CHECK(mgf_bound_check(pool, p, rho, 0.0, 0.0));
  for (double lambda = 0.1; lambda <= 1.0; lambda += 0.1) {
    CHECK(mgf_bound_check(pool, p, rho, 0.0, lambda));
    CHECK(mgf_bound_check(pool, p, rho, 1.0, lambda));
  }

  CHECK_THROWS_AS(mgf_bound_check(pool, p, rho, 1.5, 0.5), HypothesisViolated);
  CHECK_THROWS_AS(mgf_bound_check(pool, p, 0.9 * rho, 0.0, 0.5), HypothesisViolated);
  CHECK_THROWS_AS(mgf_bound_check(pool, p, rho, 0.0, 1.5), InvalidScalar);
}

TEST_CASE("exp_identity_check: fixed and random p.s.d. inputs") {
  CHECK(exp_identity_check(Matrix::Zero(2, 2)));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK(exp_identity_check(d));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CHECK(exp_identity_check(random_psd(3, seed, 1.5)));
  }
  d(1, 1) = -2.0;
  CHECK_THROWS_AS(exp_identity_check(d), NotPsd);
}

TEST_CASE("centered_norm_check: degenerate, two-point and random supports") {
  FiniteMatrixDistribution single;
  single.support = {random_psd(2, 5)};
  single.probs = Vector::Ones(1);
  CHECK(centered_norm_check(single, spectral_norm(single.support[0]) + 0.1));

  const double rho = 2.0;
  FiniteMatrixDistribution two;
  two.support = {Matrix::Zero(2, 2), rho * Matrix::Identity(2, 2)};
  Vector half(2);
  half << 0.5, 0.5;
  two.probs = half;
  CHECK(centered_norm_check(two, rho));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    FiniteMatrixDistribution dist = psd_support_dist(3, 4, seed, 1.0);
    double cap = 0.0;
    for (const Matrix& m : dist.support) cap = std::max(cap, max_eig(m));
    CHECK(centered_norm_check(dist, cap * 1.0000001));
  }

  FiniteMatrixDistribution hot = two;
  CHECK_THROWS_AS(centered_norm_check(hot, 0.5 * rho), HypothesisViolated);
}

TEST_CASE("whiten: full-rank, single-sensor and rank-deficient ensembles") {
  const SensorPool pool = random_pool(3, 9, 0.5, 19);
  const SamplingDistribution p = SamplingDistribution::uniform(9);
  const FiniteMatrixDistribution y = whiten(pool, p);
  CHECK(spectral_norm(y.mean() - Matrix::Identity(3, 3)) <= 1e-9);

  SensorPool single;
  single.d = 3;
  Vector c(3);
  c << 0.3, -0.7, 0.2;
  single.sensors = {{c, 0.5}};
  const FiniteMatrixDistribution one = whiten(single, SamplingDistribution::uniform(1));
  REQUIRE(one.size() == 1);
  CHECK(spectral_norm(one.support[0] - range_projector(info_matrix(single.sensors[0]))) <=
        1e-9);

  // Sensors confined to a 2-dim subspace of R^3: E[Y] is a rank-2 projector.
  SensorPool planar;
  planar.d = 3;
  for (std::uint64_t i = 0; i < 4; ++i) {
    Vector v = Vector::Zero(3);
    v(0) = rng::uniform01(23, i, 0) + 0.1;
    v(1) = rng::uniform01(23, i, 1) + 0.1;
    planar.sensors.push_back({v, 0.5});
  }
  const FiniteMatrixDistribution flat = whiten(planar, SamplingDistribution::uniform(4));
  const Matrix ey = flat.mean();
  const Matrix proj = range_projector(expected_info(planar, SamplingDistribution::uniform(4)));
  CHECK(spectral_norm(ey - proj) <= 1e-9);
  CHECK(ey.trace() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("whiten: range violation for numerically invisible support") {
  SensorPool pool;
  pool.d = 2;
  Vector e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  pool.sensors = {{e1, 1.0}, {e2, 1.0}};
  Vector p(2);
  p << 1.0, 1e-30;
  CHECK_THROWS_AS(whiten(pool, SamplingDistribution(p)), RangeViolation);
}

TEST_CASE("refined envelope scales are monotone in zeta") {
  const double rho = 3.2, delta = 0.05;
  const int d = 3, gamma = 400;
  double prev_r_eps = 1e18;
  for (double zeta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double eps = solve_epsilon_gen(d, delta, gamma, rho, zeta);
    const double r_eps = r_factor(rho, zeta) * eps;
    CHECK(r_eps <= prev_r_eps + 1e-15);
    prev_r_eps = r_eps;
  }
}

TEST_CASE("sum-level coverage on a small ensemble") {
  const SensorPool pool = random_pool(2, 3, 1.0, 101);
  const SamplingDistribution p = SamplingDistribution::uniform(3);
  const Matrix ez = expected_info(pool, p);
  const double rho = rho_min(pool, p);
  const double delta = 0.05;
  const int gamma = 300;
  const int trials = 500;

  const GenParams gen = make_gen_params(pool, p, delta, gamma, rho, 0.5);
  const auto [lower, upper] = gen_bounds(gen, ez);
  int n_lower = 0, n_upper = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix sum = selection_sum(pool, draw_selection(pool, p, gamma, 606, t));
    n_lower += loewner_leq(lower.matrix, sum, 1e-8);
    n_upper += loewner_leq(sum, upper.matrix, 1e-8);
  }
  const double floor = 1.0 - delta - 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
  CHECK(n_lower / static_cast<double>(trials) >= floor);
  CHECK(n_upper / static_cast<double>(trials) >= floor);
}
