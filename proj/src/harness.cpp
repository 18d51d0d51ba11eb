#include "mcss/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

#include "mcss/concentration.hpp"
#include "mcss/rng.hpp"

namespace mcss {

namespace {

// Runs fn(i) for i in [0, n); workers own disjoint index ranges and write
// only to per-index slots, so results never depend on the schedule.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

struct TrialData {
  Matrix sum;
  Matrix p_ss;
  double lam_p = 0.0;
  bool converged = false;
};

// Per-trial sums and steady-state covariances for one gamma; aggregation
// stays in trial-index order for bit-determinism.
std::vector<TrialData> run_trials(const LtiSystem& sys, const SensorPool& pool,
                                  const SamplingDistribution& p, int gamma,
                                  const TrialSettings& run) {
  std::vector<TrialData> data(run.trials);
  const Matrix p0 = Matrix::Zero(sys.dim(), sys.dim());
  parallel_for(run.trials, run.threads, [&](int t) {
    TrialData& td = data[t];
    const Selection sel =
        draw_selection(pool, p, gamma, run.seed, static_cast<std::uint64_t>(t));
    td.sum = selection_sum(pool, sel);
    try {
      SteadyStateResult ss = steady_state(sys, td.sum, p0, run.ss_tol, run.max_iter);
      td.p_ss = ss.matrix;
      td.lam_p = max_eig(ss.matrix);
      td.converged = true;
    } catch (const NoConvergence&) {
      td.converged = false;
    }
  });
  return data;
}

int count_excluded(const std::vector<TrialData>& data) {
  int n = 0;
  for (const TrialData& td : data) {
    if (!td.converged) ++n;
  }
  return n;
}

void enforce_exclusion_budget(int excluded, const TrialSettings& run,
                              const char* where) {
  if (excluded > run.exclusion_budget * run.trials) {
    throw NoConvergence(std::string(where) + ": excluded trials exceed the budget",
                        Matrix(), 0.0, excluded);
  }
}

// Two-pass mean / sample standard deviation in trial-index order.
std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

CoverageReport run_coverage(const LtiSystem& sys, const SensorPool& pool,
                            const SamplingDistribution& p, const CoverageConfig& cfg) {
  validate(sys);
  validate(pool);
  if (cfg.run.trials < 1) throw InvalidBudget("run_coverage: trials must be >= 1");

  const Matrix ez = expected_info(pool, p);
  const double rho = rho_min(pool, p);
  const AwParams aw = make_aw_params(pool, p, cfg.delta_bar, cfg.gamma, rho);
  const GenParams gen = make_gen_params(pool, p, cfg.delta, cfg.gamma, rho, cfg.zeta);

  const auto [aw_lo, aw_hi] = aw_bounds(aw, ez);
  const auto [gen_lo, gen_hi] = gen_bounds(gen, ez);
  const auto [ss_aw_u, ss_aw_l] = ss_bounds_aw(sys, aw, ez, cfg.run.ss_tol, cfg.run.max_iter);
  const auto [ss_gen_u, ss_gen_l] =
      ss_bounds_gen(sys, gen, ez, cfg.run.ss_tol, cfg.run.max_iter);

  const std::vector<TrialData> data = run_trials(sys, pool, p, cfg.gamma, cfg.run);

  CoverageReport rep;
  rep.n_trials = cfg.run.trials;
  rep.excluded = count_excluded(data);
  enforce_exclusion_budget(rep.excluded, cfg.run, "run_coverage");

  const double tol = cfg.run.order_tol;
  int n_lower = 0, n_upper = 0, n_two = 0;
  int n_ss_lower = 0, n_ss_upper = 0, n_ss_two = 0;
  std::vector<double> lams;
  lams.reserve(data.size());
  for (const TrialData& td : data) {
    const bool ev_lower = loewner_leq(gen_lo.matrix, td.sum, tol);
    const bool ev_upper = loewner_leq(td.sum, gen_hi.matrix, tol);
    const bool ev_two = loewner_leq(aw_lo.matrix, td.sum, tol) &&
                        loewner_leq(td.sum, aw_hi.matrix, tol);
    n_lower += ev_lower;
    n_upper += ev_upper;
    n_two += ev_two;
    if (!td.converged) continue;
    lams.push_back(td.lam_p);
    const bool ss_upper_ok = loewner_leq(td.p_ss, ss_gen_u.matrix, tol);
    const bool ss_lower_ok = loewner_leq(ss_gen_l.matrix, td.p_ss, tol);
    const bool ss_two_ok = loewner_leq(ss_aw_l.matrix, td.p_ss, tol) &&
                           loewner_leq(td.p_ss, ss_aw_u.matrix, tol);
    n_ss_upper += ss_upper_ok;
    n_ss_lower += ss_lower_ok;
    n_ss_two += ss_two_ok;
    // Sum-lower certifies the covariance upper bound and vice versa.
    if (ev_lower && !ss_upper_ok) ++rep.cond_violations;
    if (ev_upper && !ss_lower_ok) ++rep.cond_violations;
  }

  const double n_all = static_cast<double>(rep.n_trials);
  const double n_inc = static_cast<double>(rep.n_trials - rep.excluded);
  rep.freq_lower = n_lower / n_all;
  rep.freq_upper = n_upper / n_all;
  rep.freq_two_sided = n_two / n_all;
  rep.freq_ss_lower = n_inc > 0 ? n_ss_lower / n_inc : 0.0;
  rep.freq_ss_upper = n_inc > 0 ? n_ss_upper / n_inc : 0.0;
  rep.freq_ss_two_sided = n_inc > 0 ? n_ss_two / n_inc : 0.0;
  std::tie(rep.lam_p_mean, rep.lam_p_std) = mean_std(lams);
  rep.rho = rho;
  rep.epsilon_bar = aw.epsilon_bar;
  rep.epsilon = gen.epsilon;
  rep.r = r_factor(rho, cfg.zeta);
  rep.confidence = 1.0 - cfg.delta;
  return rep;
}

std::vector<SweepRow> sweep_gamma(const LtiSystem& sys, const SensorPool& pool,
                                  const SamplingDistribution& p, const SweepConfig& cfg) {
  validate(sys);
  validate(pool);
  if (cfg.gammas.empty() || cfg.zetas.empty()) {
    throw InvalidBudget("sweep: gamma and zeta grids must be nonempty");
  }

  const Matrix ez = expected_info(pool, p);
  const double rho = rho_min(pool, p);
  const Matrix p0 = Matrix::Zero(sys.dim(), sys.dim());

  std::vector<SweepRow> rows;
  rows.reserve(cfg.gammas.size() * cfg.zetas.size());
  for (int gamma : cfg.gammas) {
    const std::vector<TrialData> data = run_trials(sys, pool, p, gamma, cfg.run);
    const int excluded = count_excluded(data);
    enforce_exclusion_budget(excluded, cfg.run, "sweep");

    std::vector<double> lams;
    for (const TrialData& td : data) {
      if (td.converged) lams.push_back(td.lam_p);
    }
    const auto [lam_mean, lam_std] = mean_std(lams);

    // The two-sided column is shared by every zeta row at this gamma.
    std::optional<double> lam_u_aw;
    std::string aw_note;
    try {
      const double eps_bar = solve_epsilon_aw(pool.d, cfg.delta, gamma, rho);
      const Matrix xi = (1.0 - eps_bar) * static_cast<double>(gamma) * ez;
      lam_u_aw = max_eig(
          steady_state(sys, xi, p0, cfg.run.ss_tol, cfg.run.max_iter).matrix);
    } catch (const InsufficientSamples&) {
      aw_note = "aw infeasible";
    }

    for (double zeta : cfg.zetas) {
      SweepRow row;
      row.gamma = gamma;
      row.zeta = zeta;
      row.lam_u_aw = lam_u_aw;
      row.lam_p_mean = lam_mean;
      row.lam_p_std = lam_std;
      row.note = aw_note;
      try {
        const double eps = solve_epsilon_gen(pool.d, cfg.delta, gamma, rho, zeta);
        const double r = r_factor(rho, zeta);
        row.epsilon = eps;
        row.r = r;
        const double lo_scale = (1.0 - r * eps) * gamma;
        const double hi_scale = (1.0 + r * eps) * gamma;
        row.lower_trivial = lo_scale <= 0.0;
        int n_lower = 0, n_upper = 0;
        for (const TrialData& td : data) {
          n_lower += loewner_leq(lo_scale * ez, td.sum, cfg.run.order_tol);
          n_upper += loewner_leq(td.sum, hi_scale * ez, cfg.run.order_tol);
        }
        row.coverage_lower = n_lower / static_cast<double>(cfg.run.trials);
        row.coverage_upper = n_upper / static_cast<double>(cfg.run.trials);
        if (!*row.lower_trivial) {
          row.lam_u_gen = max_eig(
              steady_state(sys, lo_scale * ez, p0, cfg.run.ss_tol, cfg.run.max_iter)
                  .matrix);
        } else if (!row.note.empty()) {
          row.note += "; lower trivial";
        } else {
          row.note = "lower trivial";
        }
      } catch (const InsufficientSamples&) {
        row.note = row.note.empty() ? "gen infeasible" : row.note + "; gen infeasible";
      } catch (const InvalidRefinement&) {
        row.note = row.note.empty() ? "invalid zeta" : row.note + "; invalid zeta";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_zeta(const LtiSystem& sys, const SensorPool& pool,
                                 const SamplingDistribution& p, int gamma,
                                 const std::vector<double>& zetas, double delta,
                                 const TrialSettings& run) {
  SweepConfig cfg;
  cfg.gammas = {gamma};
  cfg.zetas = zetas;
  cfg.delta = delta;
  cfg.run = run;
  return sweep_gamma(sys, pool, p, cfg);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "gamma,zeta,epsilon,r,lam_U_gen,lam_U_aw,lam_P_mean,lam_P_std,"
      "coverage_lower,coverage_upper,lower_trivial\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const SweepRow& row : rows) {
    out += std::to_string(row.gamma) + ',' + format_double(row.zeta) + ',';
    out += opt(row.epsilon) + ',' + opt(row.r) + ',';
    out += opt(row.lam_u_gen) + ',' + opt(row.lam_u_aw) + ',';
    out += format_double(row.lam_p_mean) + ',' + format_double(row.lam_p_std) + ',';
    out += opt(row.coverage_lower) + ',' + opt(row.coverage_upper) + ',';
    if (row.lower_trivial) out += *row.lower_trivial ? "1" : "0";
    out += '\n';
  }
  return out;
}

SamplingDistribution heuristic_distribution(const SensorPool& pool,
                                            DistributionMode mode, int iters) {
  validate(pool);
  const int eta = pool.size();
  SamplingDistribution uniform = SamplingDistribution::uniform(eta);
  if (mode == DistributionMode::uniform || eta == 1) return uniform;

  // Whitened certificate of a weight vector; sensors are rank one, so the
  // top whitened eigenvalue is the quadratic form c^T E[Z]^{-1} c / sigma^2.
  const auto certificate = [&](const Vector& w) -> std::pair<double, Vector> {
    Matrix m = Matrix::Zero(pool.d, pool.d);
    for (int i = 0; i < eta; ++i) {
      if (w(i) > 0.0) m += w(i) * info_matrix(pool.sensors[i]);
    }
    const Matrix minv = pinv_psd(symmetrized(m));
    Vector g(eta);
    double worst = 0.0;
    for (int i = 0; i < eta; ++i) {
      const Sensor& s = pool.sensors[i];
      g(i) = s.c.dot(minv * s.c) / s.sigma2;
      if (w(i) > 0.0) worst = std::max(worst, g(i));
    }
    return {worst, g};
  };

  Vector w = uniform.probs();
  Vector best = w;
  auto [best_rho, g] = certificate(w);
  const double dim = static_cast<double>(pool.d);
  for (int it = 0; it < iters; ++it) {
    w = (w.array() * g.array() / dim).matrix();
    const double total = w.sum();
    if (!(total > 0.0) || !w.allFinite()) break;
    w /= total;
    double rho_now;
    std::tie(rho_now, g) = certificate(w);
    if (rho_now > 0.0 && rho_now < best_rho) {
      best_rho = rho_now;
      best = w;
    }
  }

  best /= best.sum();
  best(eta - 1) += 1.0 - best.sum();
  try {
    SamplingDistribution out(best);
    if (min_eig(expected_info(pool, out)) > 0.0) return out;
  } catch (const Error&) {
  }
  return uniform;
}

Instance build_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.d < 1 || spec.eta < 1) throw InvalidBudget("build_instance: d, eta >= 1");
  if (!(spec.sigma2 > 0.0) || !(spec.q_scale > 0.0)) {
    throw InvalidScalar("build_instance: sigma2 and q_scale must be > 0");
  }
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::uint64_t base = rng::keyed(seed, 0x696e7374ULL, attempt);
    Matrix a(spec.d, spec.d);
    for (int i = 0; i < spec.d; ++i) {
      for (int j = 0; j < spec.d; ++j) {
        a(i, j) = rng::uniform01(base, 0, static_cast<std::uint64_t>(i) * spec.d + j);
      }
    }
    const SensorPool pool =
        random_pool(spec.d, spec.eta, spec.sigma2, rng::keyed(base, 1, 0));
    const LtiSystem sys{a, spec.q_scale * Matrix::Identity(spec.d, spec.d)};

    const SamplingDistribution uniform = SamplingDistribution::uniform(spec.eta);
    if (!(min_eig(expected_info(pool, uniform)) > 0.0)) continue;
    bool all_detectable = true;
    for (const Sensor& s : pool.sensors) {
      if (!detectability_check(a, {s.c})) {
        all_detectable = false;
        break;
      }
    }
    if (!all_detectable) continue;
    return {sys, pool, attempt};
  }
  throw GenerationFailed("build_instance: exceeded 1000 attempts");
}

Instance build_fig1_instance(std::uint64_t seed) {
  return build_instance(InstanceSpec{}, seed);
}

}  // namespace mcss
