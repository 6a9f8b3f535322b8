#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "tcpwin/coupling.hpp"
#include "tcpwin/embedded.hpp"
#include "tcpwin/empirical.hpp"
#include "tcpwin/experiments.hpp"
#include "tcpwin/parallel.hpp"
#include "tcpwin/process.hpp"
#include "tcpwin/quadrature.hpp"
#include "tcpwin/toy_chain.hpp"

namespace tcpwin {

namespace {

// Stream addressing: (experiment id | sub-purpose | block). Every replica
// block owns one stream, so results never depend on thread scheduling and
// any block can be replayed in isolation.
struct StreamPlan {
  std::uint64_t root;
  std::uint64_t exp_id;

  RngStream block_stream(std::uint64_t sub, std::uint64_t block) const {
    return RngStream(root, (exp_id << 56) | (sub << 48) | block);
  }
};

std::uint64_t experiment_id(const std::string& name) {
  const auto& names = experiment_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw std::invalid_argument("unknown experiment '" + name + "'");
  }
  return static_cast<std::uint64_t>(it - names.begin());
}

using FillFn = std::function<void(std::size_t, RngStream&, std::span<double>)>;

// Per-replica rows reduced to per-column Welford statistics, merged in block
// order.
std::vector<RunningStats> replica_grid_stats(const StreamPlan& plan,
                                             std::uint64_t sub, std::size_t n,
                                             std::size_t width,
                                             std::size_t block_size,
                                             const FillFn& fill) {
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<std::vector<RunningStats>> per_block(
      n_blocks, std::vector<RunningStats>(width));
  parallel_blocks(n, block_size,
                  [&](std::size_t begin, std::size_t end, std::size_t b) {
                    RngStream stream = plan.block_stream(sub, b);
                    std::vector<double> row(width);
                    std::vector<RunningStats>& stats = per_block[b];
                    for (std::size_t i = begin; i < end; ++i) {
                      fill(i, stream, row);
                      for (std::size_t k = 0; k < width; ++k) stats[k].add(row[k]);
                    }
                  });
  std::vector<RunningStats> merged(width);
  for (const auto& block : per_block) {
    for (std::size_t k = 0; k < width; ++k) merged[k].merge(block[k]);
  }
  return merged;
}

// Raw per-replica rows, stored column-major (columns[k][i]).
std::vector<std::vector<double>> replica_matrix(const StreamPlan& plan,
                                                std::uint64_t sub, std::size_t n,
                                                std::size_t width,
                                                std::size_t block_size,
                                                const FillFn& fill) {
  std::vector<std::vector<double>> columns(width, std::vector<double>(n));
  parallel_blocks(n, block_size,
                  [&](std::size_t begin, std::size_t end, std::size_t b) {
                    RngStream stream = plan.block_stream(sub, b);
                    std::vector<double> row(width);
                    for (std::size_t i = begin; i < end; ++i) {
                      fill(i, stream, row);
                      for (std::size_t k = 0; k < width; ++k) columns[k][i] = row[k];
                    }
                  });
  return columns;
}

MultiplicativeLaw law_or_default(const ExperimentConfig& config,
                                 double default_delta = 0.5) {
  if (config.jump_law) return *config.jump_law;
  return MultiplicativeLaw::dirac(default_delta);
}

double dirac_delta_of(const MultiplicativeLaw& law, const std::string& experiment) {
  if (!law.is_dirac()) {
    throw std::invalid_argument("config: experiment '" + experiment +
                                "' requires a dirac jump_law");
  }
  return law.dirac_delta();
}

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// ---------------------------------------------------------------------
// figure-comp: the three curves of the comparison picture. True W_1 between
// the time-t marginals started at x0 and y0 (independent clouds, comonotone
// W_1, bootstrap errors), the coupled mean distance, and the algebraic bound
// d0 / (1 + (1+h) d0 t); the three must be ordered at every grid point.
ExperimentResult run_figure_comp(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double h = dirac_delta_of(law, config.experiment);
  const double x0 = config.x0.value_or(2.0);
  const double y0 = config.y0.value_or(1.0);
  const std::size_t n_coupled = config.n_replicas.value_or(100000);
  // The empirical W_1 between independent clouds carries a positive
  // O(n^{-1/2}) noise floor; 1e5 replicas push it below the coupled curve on
  // the whole grid.
  const std::size_t n_marginal = config.marginal_replicas.value_or(100000);
  const GridSpec grid =
      config.time_grid.value_or(GridSpec::uniform(0.0, 10.0, 0.25));
  const std::vector<double> times = grid.points();
  const double d0 = std::abs(x0 - y0);
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  const std::vector<RunningStats> coupled = replica_grid_stats(
      plan, 0, n_coupled, times.size(), 1024,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        std::vector<double> xs(times.size());
        std::vector<double> ys(times.size());
        simulate_coupled_on_grid(x0, y0, 0.0, law, times, stream, xs, ys);
        for (std::size_t k = 0; k < times.size(); ++k) {
          row[k] = std::abs(xs[k] - ys[k]);
        }
      });

  const ProcessSpec spec = ProcessSpec::linear(law);
  auto marginal_fill = [&](double start) {
    return [&, start](std::size_t, RngStream& stream, std::span<double> row) {
      simulate_on_grid(spec, start, times, stream, row);
    };
  };
  auto cloud_x =
      replica_matrix(plan, 1, n_marginal, times.size(), 512, marginal_fill(x0));
  auto cloud_y =
      replica_matrix(plan, 2, n_marginal, times.size(), 512, marginal_fill(y0));

  // Sort + bootstrap per grid point, parallel across points (each point has
  // its own stream, so the output does not depend on scheduling).
  std::vector<double> w1(times.size());
  std::vector<double> w1_se(times.size());
  parallel_blocks(times.size(), 1,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t k = begin; k < end; ++k) {
                      EmpiricalDistribution ex(std::move(cloud_x[k]));
                      EmpiricalDistribution ey(std::move(cloud_y[k]));
                      w1[k] = wasserstein_p(ex, ey, 1.0);
                      RngStream boot_stream = plan.block_stream(3, k);
                      w1_se[k] =
                          bootstrap_stderr_wp(ex, ey, 1.0, 200, boot_stream);
                    }
                  });

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"figure_comp",
                   {"t", "w1_true", "w1_true_stderr", "coupled_mean",
                    "coupled_stderr", "bound"},
                   {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double coupled_mean = coupled[k].mean;
    const double coupled_se = coupled[k].stderr_of_mean();
    const double bound = real_tcp_bound(h, d0, t);
    curve.add_row({t, w1[k], w1_se[k], coupled_mean, coupled_se, bound});
    result.reports.push_back(BoundReport::upper(
        "coupled_mean_below_bound", {{"t", t}, {"h", h}, {"d0", d0}}, bound,
        coupled_mean, coupled_se));
    result.reports.push_back(BoundReport::upper(
        "w1_below_coupled_mean", {{"t", t}}, coupled_mean, w1[k],
        hypot2(w1_se[k], coupled_se)));
  }
  result.curves.push_back(std::move(curve));
  return result;
}

// ---------------------------------------------------------------------
// embedded-contraction: shared-(E,Q) chains from x0 and y0; the W_p distance
// of the step-n laws contracts like E(Q^p)^{n/p}.
ExperimentResult run_embedded_contraction(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double x0 = config.x0.value_or(2.0);
  const double y0 = config.y0.value_or(1.0);
  const double p = config.p.value_or(1.0);
  const std::size_t n_replicas = config.n_replicas.value_or(100000);
  std::vector<int> steps;
  if (config.step_grid) {
    steps = *config.step_grid;
  } else {
    const int max_steps = config.max_steps.value_or(12);
    for (int n = 0; n <= max_steps; ++n) steps.push_back(n);
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  const int last_step = steps.back();
  const double w0 = std::abs(x0 - y0);
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  const std::vector<RunningStats> stats = replica_grid_stats(
      plan, 0, n_replicas, steps.size(), 1024,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        double x = x0;
        double y = y0;
        std::size_t k = 0;
        for (int n = 0; n <= last_step; ++n) {
          if (k < steps.size() && steps[k] == n) {
            row[k] = std::pow(std::abs(x - y), p);
            ++k;
          }
          if (n == last_step) break;
          const double e = stream.exponential();
          const double q = law.sample(stream);
          x = chain_step(x, e, q);
          y = chain_step(y, e, q);
        }
      });

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"embedded_contraction",
                   {"n", "wp_estimate", "wp_stderr", "bound"},
                   {}};
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const int n = steps[k];
    const double mean_p = stats[k].mean;
    const double se_p = stats[k].stderr_of_mean();
    // (E|X-Y|^p)^{1/p} and its delta-method standard error.
    const double wp = std::pow(mean_p, 1.0 / p);
    const double wp_se =
        mean_p > 0.0 ? se_p * std::pow(mean_p, 1.0 / p - 1.0) / p : 0.0;
    const double bound = embedded_contraction_bound(p, n, law, w0);
    curve.add_row({static_cast<double>(n), wp, wp_se, bound});
    result.reports.push_back(BoundReport::upper(
        "embedded_wp_contraction",
        {{"n", static_cast<double>(n)}, {"p", p}, {"w0", w0}}, bound, wp, wp_se));
  }
  result.curves.push_back(std::move(curve));
  return result;
}

// ---------------------------------------------------------------------
// continuous-decay: coupled mean distance under the shifted-rate dynamics
// against exp(-a kappa1 t) W_1(initial).
ExperimentResult run_continuous_decay(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double a = config.a.value_or(1.0);
  if (!(a > 0.0)) {
    throw std::invalid_argument("config: continuous-decay requires a > 0");
  }
  const double x0 = config.x0.value_or(2.0);
  const double y0 = config.y0.value_or(1.0);
  const std::size_t n_replicas = config.n_replicas.value_or(100000);
  const GridSpec grid = config.time_grid.value_or(
      GridSpec::points(std::vector<double>{0.5, 1.0, 2.0, 4.0}));
  const std::vector<double> times = grid.points();
  const double w0 = std::abs(x0 - y0);
  const double kappa1 = law.kappa1();
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  const std::vector<RunningStats> stats = replica_grid_stats(
      plan, 0, n_replicas, times.size(), 1024,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        std::vector<double> xs(times.size());
        std::vector<double> ys(times.size());
        simulate_coupled_on_grid(x0, y0, a, law, times, stream, xs, ys);
        for (std::size_t k = 0; k < times.size(); ++k) {
          row[k] = std::abs(xs[k] - ys[k]);
        }
      });

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"continuous_decay",
                   {"t", "mean_distance", "stderr", "bound"},
                   {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double bound = continuous_decay_bound(a, kappa1, t, w0);
    curve.add_row({t, stats[k].mean, stats[k].stderr_of_mean(), bound});
    result.reports.push_back(BoundReport::upper(
        "continuous_decay", {{"t", t}, {"a", a}, {"kappa1", kappa1}}, bound,
        stats[k].mean, stats[k].stderr_of_mean()));
  }
  result.curves.push_back(std::move(curve));
  return result;
}

// ---------------------------------------------------------------------
// strong-ergodicity: (i) coupled mean distance from (0, N) at t = 2 must sit
// below the N-independent bound 2 e^{a k s} / (d tanh(d s)) e^{-a k t};
// (ii) the process mean from any start stays below 1/(d tanh(d t)).
ExperimentResult run_strong_ergodicity(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double a = config.a.value_or(1.0);
  if (!(a > 0.0)) {
    throw std::invalid_argument("config: strong-ergodicity requires a > 0");
  }
  const std::size_t n_replicas = config.n_replicas.value_or(100000);
  const double kappa1 = law.kappa1();
  const double s = 1.0;
  const double t = 2.0;
  const std::vector<double> upper_starts = {1.0, 10.0, 100.0, 1000.0};
  const std::vector<double> mean_starts = {0.0, 1.0, 10.0, 100.0};
  const std::vector<double> mean_times = {0.5, 1.0, 2.0};
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  ExperimentResult result;
  result.experiment = config.experiment;
  const double uniform_bound = strong_ergodicity_bound(a, kappa1, s, t);

  CurveTable curve{"strong_uniform",
                   {"N", "mean_distance", "stderr", "bound"},
                   {}};
  for (std::size_t idx = 0; idx < upper_starts.size(); ++idx) {
    const double n_start = upper_starts[idx];
    const std::vector<double> grid = {t};
    const std::vector<RunningStats> stats = replica_grid_stats(
        plan, 1 + idx, n_replicas, 1, 1024,
        [&](std::size_t, RngStream& stream, std::span<double> row) {
          double xs = 0.0;
          double ys = 0.0;
          simulate_coupled_on_grid(0.0, n_start, a, law, grid, stream,
                                   std::span<double>(&xs, 1),
                                   std::span<double>(&ys, 1));
          row[0] = std::abs(xs - ys);
        });
    curve.add_row({n_start, stats[0].mean, stats[0].stderr_of_mean(),
                   uniform_bound});
    result.reports.push_back(BoundReport::upper(
        "strong_ergodicity_uniform_in_N",
        {{"N", n_start}, {"s", s}, {"t", t}, {"a", a}, {"kappa1", kappa1}},
        uniform_bound, stats[0].mean, stats[0].stderr_of_mean()));
  }
  result.curves.push_back(std::move(curve));

  const ProcessSpec spec = ProcessSpec::shifted(a, law);
  CurveTable mean_curve{"riccati_mean_bound",
                        {"x0", "t", "mean", "stderr", "bound"},
                        {}};
  for (std::size_t idx = 0; idx < mean_starts.size(); ++idx) {
    const double start = mean_starts[idx];
    const std::vector<RunningStats> stats = replica_grid_stats(
        plan, 10 + idx, n_replicas, mean_times.size(), 1024,
        [&](std::size_t, RngStream& stream, std::span<double> row) {
          simulate_on_grid(spec, start, mean_times, stream, row);
        });
    for (std::size_t k = 0; k < mean_times.size(); ++k) {
      const double bound = riccati_mean_bound(kappa1, mean_times[k]);
      mean_curve.add_row({start, mean_times[k], stats[k].mean,
                          stats[k].stderr_of_mean(), bound});
      result.reports.push_back(BoundReport::upper(
          "riccati_mean_bound", {{"x0", start}, {"t", mean_times[k]}}, bound,
          stats[k].mean, stats[k].stderr_of_mean()));
    }
  }
  result.curves.push_back(std::move(mean_curve));
  return result;
}

// ---------------------------------------------------------------------
// real-tcp: unshifted dynamics, Dirac(h) factors. Mean coupled distance under
// d0/(1+(1+h) d0 t) plus the differential test: the centred finite difference
// of the mean-distance curve must not exceed -(1+h) E(distance^2).
ExperimentResult run_real_tcp(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double h = dirac_delta_of(law, config.experiment);
  const double x0 = config.x0.value_or(2.0);
  const double y0 = config.y0.value_or(1.0);
  const std::size_t n_replicas = config.n_replicas.value_or(100000);
  const GridSpec grid = config.time_grid.value_or(
      GridSpec::points(std::vector<double>{1.0, 2.0, 5.0, 10.0, 20.0}));
  const std::vector<double> check_times = grid.points();
  const std::vector<double> slope_times = {1.0, 5.0};
  const double fd_delta = 0.25;
  const double d0 = std::abs(x0 - y0);
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  // One recording grid holding the check times and the stencils t-d, t, t+d.
  std::set<double> time_set(check_times.begin(), check_times.end());
  for (double ts : slope_times) {
    time_set.insert(ts - fd_delta);
    time_set.insert(ts);
    time_set.insert(ts + fd_delta);
  }
  const std::vector<double> times(time_set.begin(), time_set.end());
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };

  // Row layout: distances on the grid, then per slope time the statistic
  // g = (D(t+d) - D(t-d))/(2d) + (1+h) D(t)^2, whose mean must be <= 0.
  const std::size_t width = times.size() + slope_times.size();
  const std::vector<RunningStats> stats = replica_grid_stats(
      plan, 0, n_replicas, width, 1024,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        std::vector<double> xs(times.size());
        std::vector<double> ys(times.size());
        simulate_coupled_on_grid(x0, y0, 0.0, law, times, stream, xs, ys);
        for (std::size_t k = 0; k < times.size(); ++k) {
          row[k] = std::abs(xs[k] - ys[k]);
        }
        for (std::size_t j = 0; j < slope_times.size(); ++j) {
          const double d_minus = row[index_of(slope_times[j] - fd_delta)];
          const double d_mid = row[index_of(slope_times[j])];
          const double d_plus = row[index_of(slope_times[j] + fd_delta)];
          row[times.size() + j] = (d_plus - d_minus) / (2.0 * fd_delta) +
                                  (1.0 + h) * d_mid * d_mid;
        }
      });

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"real_tcp", {"t", "mean_distance", "stderr", "bound"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    curve.add_row({times[k], stats[k].mean, stats[k].stderr_of_mean(),
                   real_tcp_bound(h, d0, times[k])});
  }
  result.curves.push_back(std::move(curve));
  for (double t : check_times) {
    const std::size_t k = index_of(t);
    result.reports.push_back(BoundReport::upper(
        "real_tcp_decay", {{"t", t}, {"h", h}, {"d0", d0}},
        real_tcp_bound(h, d0, t), stats[k].mean, stats[k].stderr_of_mean()));
  }
  CurveTable slope_curve{"real_tcp_slope",
                         {"t", "fd_plus_rhs_mean", "stderr"},
                         {}};
  for (std::size_t j = 0; j < slope_times.size(); ++j) {
    const RunningStats& g = stats[times.size() + j];
    slope_curve.add_row({slope_times[j], g.mean, g.stderr_of_mean()});
    result.reports.push_back(BoundReport::upper(
        "gronwall_slope", {{"t", slope_times[j]}, {"fd_delta", fd_delta}}, 0.0,
        g.mean, g.stderr_of_mean()));
  }
  result.curves.push_back(std::move(slope_curve));
  return result;
}

// ---------------------------------------------------------------------
// constant-rate: transient moments against the exact partial-fraction formula
// and the shared-clock coupling decay rate theta_1.
ExperimentResult run_constant_rate(const ExperimentConfig& config) {
  const MultiplicativeLaw law = law_or_default(config);
  const double lambda = config.lambda.value_or(1.0);
  const double x0 = config.x0.value_or(0.0);
  const std::size_t n_moments = config.n_replicas.value_or(1000000);
  const GridSpec grid = config.time_grid.value_or(
      GridSpec::points(std::vector<double>{1.0, 2.0, 5.0}));
  const std::vector<double> times = grid.points();
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};
  const ProcessSpec spec = ProcessSpec::constant_rate(lambda, law);

  // Rows: X(t_k) then X(t_k)^2.
  const std::size_t width = 2 * times.size();
  const std::vector<RunningStats> stats = replica_grid_stats(
      plan, 0, n_moments, width, 2048,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        simulate_on_grid(spec, x0, times, stream, row.subspan(0, times.size()));
        for (std::size_t k = 0; k < times.size(); ++k) {
          row[times.size() + k] = row[k] * row[k];
        }
      });

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable moments{"constant_rate_moments",
                     {"t", "mc_mean", "mean_stderr", "exact_mean", "mc_second",
                      "second_stderr", "exact_second"},
                     {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double exact1 = moments_constant_rate(1, x0, lambda, law, t);
    const double exact2 = moments_constant_rate(2, x0, lambda, law, t);
    moments.add_row({t, stats[k].mean, stats[k].stderr_of_mean(), exact1,
                     stats[times.size() + k].mean,
                     stats[times.size() + k].stderr_of_mean(), exact2});
    result.reports.push_back(BoundReport::match(
        "constant_rate_mean", {{"t", t}, {"lambda", lambda}, {"x0", x0}}, exact1,
        stats[k].mean, stats[k].stderr_of_mean()));
    result.reports.push_back(BoundReport::match(
        "constant_rate_second_moment", {{"t", t}, {"lambda", lambda}, {"x0", x0}},
        exact2, stats[times.size() + k].mean,
        stats[times.size() + k].stderr_of_mean()));
  }
  result.curves.push_back(std::move(moments));

  // The first moment solves m' = 1 - theta_1 m, so the formula must agree
  // with 1/theta_1 + (x0 - 1/theta_1) exp(-theta_1 t) to full precision.
  const double th1 = theta_p(lambda, 1.0, law);
  double worst_gap = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.25 * i;
    const double ode = 1.0 / th1 + (x0 - 1.0 / th1) * std::exp(-th1 * t);
    worst_gap = std::max(
        worst_gap, std::abs(moments_constant_rate(1, x0, lambda, law, t) - ode));
  }
  result.reports.push_back(BoundReport::match(
      "constant_rate_mean_vs_ode", {{"lambda", lambda}, {"x0", x0}}, 0.0,
      worst_gap, 0.0, 1e-9));

  // Shared-clock coupling decay: log E distance is exactly linear with slope
  // -theta_1. Each grid point gets its own replica batch so the regression
  // errors are independent, and the fit is weighted by the delta-method
  // standard deviations of the log-means (the noise grows with t, which a
  // plain OLS stderr would badly understate).
  const double cx = 2.0;
  const double cy = 1.0;  // fixed decay pair
  const std::size_t n_decay = config.n_replicas ? *config.n_replicas : 100000;
  const GridSpec decay_grid = GridSpec::uniform(0.0, 8.0, 0.5);
  const std::vector<double> decay_times = decay_grid.points();

  CurveTable decay{"constant_rate_decay",
                   {"t", "mean_distance", "stderr", "log_mean"},
                   {}};
  decay.add_row({0.0, std::abs(cx - cy), 0.0, std::log(std::abs(cx - cy))});
  std::vector<double> ts;
  std::vector<double> logs;
  std::vector<double> log_sigmas;
  RunningStats last_stats;
  for (std::size_t k = 1; k < decay_times.size(); ++k) {
    const double t = decay_times[k];
    const std::vector<double> point{t};
    const std::vector<RunningStats> stats = replica_grid_stats(
        plan, 8 + k, n_decay, 1, 2048,
        [&](std::size_t, RngStream& stream, std::span<double> row) {
          const ConstantRateCoupledPath path =
              coupled_constant_rate(cx, cy, lambda, law, t, stream);
          row[0] = path.distance_at(point[0]);
        });
    const double m = stats[0].mean;
    const double se = stats[0].stderr_of_mean();
    decay.add_row({t, m, se, m > 0.0 ? std::log(m) : 0.0});
    if (m > 0.0 && se > 0.0) {
      ts.push_back(t);
      logs.push_back(std::log(m));
      log_sigmas.push_back(se / m);
    }
    if (k == decay_times.size() - 1) last_stats = stats[0];
  }
  result.curves.push_back(std::move(decay));
  const LinearFit fit = wls_fit(ts, logs, log_sigmas);
  result.reports.push_back(BoundReport::match(
      "constant_rate_decay_slope", {{"lambda", lambda}, {"theta1", th1}}, -th1,
      fit.slope, fit.slope_stderr, 0.0));
  // Pointwise identity E distance(t) = d0 exp(-theta_1 t) at the grid end.
  result.reports.push_back(BoundReport::match(
      "constant_rate_distance_identity", {{"t", decay_times.back()}},
      std::abs(cx - cy) * std::exp(-th1 * decay_times.back()), last_stats.mean,
      last_stats.stderr_of_mean()));
  return result;
}

// ---------------------------------------------------------------------
// invariant-law: the Dirac-delta invariant density, its quadrature CDF, the
// series sampler and the product-form exponential moments all describe one
// law; check them against each other.
ExperimentResult run_invariant_law(const ExperimentConfig& config) {
  const double delta =
      config.delta.value_or(law_or_default(config).is_dirac()
                                ? law_or_default(config).dirac_delta()
                                : 0.5);
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(delta);
  const std::size_t n_draws = config.n_replicas.value_or(1000000);
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};
  const InvariantLawSpec inv_spec = InvariantLawSpec::with_default_depth(law);

  ExperimentResult result;
  result.experiment = config.experiment;

  const double integral = invariant_density_integral(delta, 1e-10);
  result.reports.push_back(BoundReport::match(
      "invariant_density_normalisation", {{"delta", delta}}, 1.0, integral, 0.0,
      1e-8));

  const auto draws_columns = replica_matrix(
      plan, 0, n_draws, 1, 4096,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        row[0] = sample_invariant(inv_spec, stream);
      });
  EmpiricalDistribution draws(draws_columns[0]);

  const InvariantCdf cdf(delta);
  const double ks =
      ks_statistic_vs_cdf(draws, [&](double x) { return cdf(x); });
  // 2/sqrt(n): 0.002 at the default 1e6-draw budget, and the same sampling
  // scale when the budget is overridden.
  const double ks_threshold = 2.0 / std::sqrt(static_cast<double>(n_draws));
  result.reports.push_back(BoundReport::upper(
      "invariant_sampler_vs_density_ks",
      {{"delta", delta}, {"n_draws", static_cast<double>(n_draws)}},
      ks_threshold, ks, 0.0, 0.0));

  const std::vector<double> mgf_points = {0.25, 0.5, 1.0};
  for (double s : mgf_points) {
    RngStream unused(config.root_seed, 0);  // Dirac product is deterministic
    const MeanStderr product = mgf_invariant(s, law, 1, 64, unused);
    RunningStats mc;
    for (double x : draws.samples()) mc.add(std::exp(s * x * x));
    result.reports.push_back(BoundReport::match(
        "invariant_mgf", {{"s", s}, {"delta", delta}}, product.mean, mc.mean,
        mc.stderr_of_mean()));
  }

  // Divergence threshold 2 s delta^2 = 1: just above it the evaluator must
  // refuse.
  const double s_div = 1.005 / (2.0 * delta * delta);
  bool threw = false;
  try {
    RngStream unused(config.root_seed, 1);
    (void)mgf_invariant(s_div, law, 1, 64, unused);
  } catch (const DivergentMgf&) {
    threw = true;
  }
  result.reports.push_back(BoundReport::match(
      "invariant_mgf_divergence_detected", {{"s", s_div}, {"delta", delta}}, 1.0,
      threw ? 1.0 : 0.0, 0.0, 0.0));

  CurveTable table{"invariant_law", {"x", "density", "cdf"}, {}};
  const double upper = invariant_density_cutoff(delta);
  const GridSpec x_grid =
      config.time_grid.value_or(GridSpec::uniform(0.0, upper, upper / 256.0));
  for (double x : x_grid.points()) {
    table.add_row({x, invariant_density_series(x, delta).value, cdf(x)});
  }
  result.curves.push_back(std::move(table));
  return result;
}

// ---------------------------------------------------------------------
// concentration: ergodic averages of f(x) = x over independent chains; the
// deviation frequency beyond u + delta/(1-delta) W_1(delta_x, nu) must stay
// below the Gaussian bound.
ExperimentResult run_concentration(const ExperimentConfig& config) {
  const double delta = config.delta.value_or(0.5);
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(delta);
  const double x0 = config.x0.value_or(1.0);
  const std::size_t n_steps = config.chain_steps.value_or(10000);
  const std::size_t n_runs = config.runs.value_or(1000);
  const std::vector<double> u_grid = {0.02, 0.05, 0.1};
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};

  // int f dnu by quadrature against the density (f is identity here).
  const double center =
      invariant_expectation([](double y) { return y; }, delta, 1e-10);

  // W_1(delta_x, nu) is a plain expectation; estimate it from invariant draws.
  const std::size_t n_offset_draws = 1000000;
  const InvariantLawSpec inv_spec = InvariantLawSpec::with_default_depth(law);
  const auto offset_columns = replica_matrix(
      plan, 1, n_offset_draws, 1, 4096,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        row[0] = sample_invariant(inv_spec, stream);
      });
  const EmpiricalDistribution offset_draws(offset_columns[0]);
  const double w1_to_start = w1_to_dirac(x0, offset_draws);
  const double offset = delta / (1.0 - delta) * w1_to_start;

  const auto averages_columns = replica_matrix(
      plan, 0, n_runs, 1, 16,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        row[0] = ergodic_average([](double y) { return y; }, x0, n_steps, law,
                                 stream);
      });
  const std::vector<double>& averages = averages_columns[0];

  const std::vector<double> freqs =
      deviation_frequency(averages, center, offset, u_grid);

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"concentration",
                   {"u", "frequency", "bound", "binomial_sigma"},
                   {}};
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const double bound = concentration_bound(delta, n_steps, u_grid[i]);
    const double sigma =
        std::sqrt(bound * (1.0 - bound) / static_cast<double>(n_runs));
    curve.add_row({u_grid[i], freqs[i], bound, sigma});
    result.reports.push_back(BoundReport::upper(
        "concentration_frequency",
        {{"u", u_grid[i]},
         {"n_steps", static_cast<double>(n_steps)},
         {"offset", offset},
         {"center", center}},
        bound, freqs[i], sigma));
  }
  result.curves.push_back(std::move(curve));

  CurveTable runs_curve{"concentration_runs", {"run", "average"}, {}};
  for (std::size_t r = 0; r < averages.size(); ++r) {
    runs_curve.add_row({static_cast<double>(r), averages[r]});
  }
  result.curves.push_back(std::move(runs_curve));
  return result;
}

// ---------------------------------------------------------------------
// gross-tails: the invariant law satisfies a log-Sobolev inequality with
// constant 2 delta^2/(1-delta^2), hence a sub-Gaussian tail; fit the free
// constant at r = 1 and check the slope at larger r.
ExperimentResult run_gross_tails(const ExperimentConfig& config) {
  const double delta = config.delta.value_or(0.5);
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(delta);
  const std::size_t n_draws = config.n_replicas.value_or(1000000);
  const StreamPlan plan{config.root_seed, experiment_id(config.experiment)};
  const InvariantLawSpec inv_spec = InvariantLawSpec::with_default_depth(law);

  const auto draws_columns = replica_matrix(
      plan, 0, n_draws, 1, 4096,
      [&](std::size_t, RngStream& stream, std::span<double> row) {
        row[0] = sample_invariant(inv_spec, stream);
      });
  const EmpiricalDistribution draws(draws_columns[0]);
  const std::vector<double>& sorted = draws.samples();
  const double n = static_cast<double>(sorted.size());

  auto tail_prob = [&](double r) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), r);
    return static_cast<double>(sorted.end() - it) / n;
  };

  const double gross = gross_constants(delta, 1).second;
  const double r_fit = 1.0;
  const double p_fit = tail_prob(r_fit);
  if (!(p_fit > 0.0)) {
    throw std::runtime_error("gross-tails: no mass above the fit radius");
  }
  const double c_fit = std::log(p_fit) + r_fit * r_fit / gross;

  ExperimentResult result;
  result.experiment = config.experiment;
  const std::vector<double> r_checks = {1.5, 2.0, 2.5};
  for (double r : r_checks) {
    const double p = tail_prob(r);
    // Zero hits resolve only to < 1/n; report that ceiling, which still has
    // to sit below the bound.
    const double log_p = std::log(std::max(p, 1.0 / n));
    const double rhs = c_fit - r * r / gross;
    result.reports.push_back(BoundReport::upper(
        "gross_subgaussian_tail",
        {{"r", r}, {"delta", delta}, {"gross", gross}, {"hits", p * n}}, rhs,
        log_p, 0.0, 0.0));
  }

  CurveTable curve{"gross_tails", {"r", "tail_prob", "log_tail", "rhs"}, {}};
  for (int i = 0; i <= 12; ++i) {
    const double r = 0.25 * i;
    const double p = tail_prob(r);
    curve.add_row({r, p, p > 0.0 ? std::log(p) : std::log(1.0 / n),
                   c_fit - r * r / gross});
  }
  result.curves.push_back(std::move(curve));
  return result;
}

// ---------------------------------------------------------------------
// toy-chain: exact distribution propagation; the moment recursion
// E(X_{n+1}) = E(X_n) - E(X_n^2)/4 and the (6/7)(7/8)^n decay are identities
// of the pushforward, checked to near machine precision.
ExperimentResult run_toy_chain(const ExperimentConfig& config) {
  const int n_max = config.max_steps.value_or(200);

  ExperimentResult result;
  result.experiment = config.experiment;
  CurveTable curve{"toy_chain", {"n", "E_Xn", "E_Xn2", "bound"}, {}};

  std::vector<double> e1(n_max + 1);
  std::vector<double> e2(n_max + 1);
  DyadicDistribution dist = DyadicDistribution::dirac_one();
  double mass_drift = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    e1[n] = dist.moment(1);
    e2[n] = dist.moment(2);
    mass_drift = std::max(mass_drift, std::abs(dist.total_mass() - 1.0));
    const double bound =
        n >= 1 ? (6.0 / 7.0) * std::pow(7.0 / 8.0, n) : 1.0;
    curve.add_row({static_cast<double>(n), e1[n], e2[n], bound});
    if (n < n_max) dist = toy_step(dist);
  }
  result.curves.push_back(std::move(curve));

  double residual = 0.0;
  for (int n = 0; n < n_max; ++n) {
    residual = std::max(residual,
                        std::abs(e1[n + 1] - (e1[n] - 0.25 * e2[n])));
  }
  result.reports.push_back(BoundReport::match(
      "toy_moment_recursion_residual", {{"n_max", static_cast<double>(n_max)}},
      0.0, residual, 0.0, 1e-13));
  result.reports.push_back(
      BoundReport::match("toy_first_step_mean", {}, 0.75, e1[1], 0.0, 0.0));

  double worst_decay_gap = -1.0;
  double worst_second_moment_gap = -1.0;
  double worst_monotone_gap = -1.0;
  for (int n = 1; n <= n_max; ++n) {
    worst_decay_gap = std::max(
        worst_decay_gap, e1[n] - (6.0 / 7.0) * std::pow(7.0 / 8.0, n));
    worst_second_moment_gap =
        std::max(worst_second_moment_gap, 0.5 * e1[n] - e2[n]);
    worst_monotone_gap = std::max(worst_monotone_gap, e1[n] - e1[n - 1]);
  }
  result.reports.push_back(BoundReport::upper(
      "toy_decay_bound", {{"n_max", static_cast<double>(n_max)}}, 0.0,
      worst_decay_gap, 0.0, 0.0));
  result.reports.push_back(BoundReport::upper(
      "toy_second_moment_lower_bound", {}, 0.0, worst_second_moment_gap, 0.0,
      0.0));
  result.reports.push_back(BoundReport::upper(
      "toy_mean_strictly_decreasing", {}, 0.0, worst_monotone_gap, 0.0, 0.0));
  result.reports.push_back(BoundReport::match(
      "toy_mass_conservation", {}, 0.0, mass_drift, 0.0, 1e-14));

  CurveTable escape{"toy_escape", {"depth", "product"}, {}};
  for (int depth = 1; depth <= 60; ++depth) {
    escape.add_row({static_cast<double>(depth), toy_escape_probability(depth)});
  }
  result.curves.push_back(std::move(escape));
  result.reports.push_back(BoundReport::match(
      "toy_escape_stabilised", {{"depth", 60.0}}, toy_escape_probability(59),
      toy_escape_probability(60), 0.0, 1e-15));
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string& name = config.experiment;
  if (name == "figure-comp") return run_figure_comp(config);
  if (name == "embedded-contraction") return run_embedded_contraction(config);
  if (name == "continuous-decay") return run_continuous_decay(config);
  if (name == "strong-ergodicity") return run_strong_ergodicity(config);
  if (name == "real-tcp") return run_real_tcp(config);
  if (name == "constant-rate") return run_constant_rate(config);
  if (name == "invariant-law") return run_invariant_law(config);
  if (name == "concentration") return run_concentration(config);
  if (name == "gross-tails") return run_gross_tails(config);
  if (name == "toy-chain") return run_toy_chain(config);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace tcpwin
