#include "tcpwin/embedded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tcpwin/quadrature.hpp"

namespace tcpwin {

double chain_step(double x, double e, double q) {
  if (!(x >= 0.0) || !(e >= 0.0) || !(q >= 0.0)) {
    throw std::invalid_argument("chain_step: arguments must be nonnegative");
  }
  return q * std::sqrt(x * x + 2.0 * e);
}

MeanStderr kernel_expectation(const std::function<double(double)>& f, double x,
                              const MultiplicativeLaw& law, std::size_t n_mc,
                              RngStream& stream) {
  if (n_mc == 0) {
    throw std::invalid_argument("kernel_expectation: n_mc must be positive");
  }
  RunningStats stats;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double e = stream.exponential();
    const double q = law.sample(stream);
    stats.add(f(chain_step(x, e, q)));
  }
  return MeanStderr{stats.mean, stats.stderr_of_mean()};
}

InvariantLawSpec::InvariantLawSpec(MultiplicativeLaw law, int depth,
                                   int density_terms_)
    : jump_law(std::move(law)), truncation_depth(depth),
      density_terms(density_terms_) {
  if (truncation_depth < 1) {
    throw std::invalid_argument("InvariantLawSpec: truncation_depth must be >= 1");
  }
  if (density_terms < 1) {
    throw std::invalid_argument("InvariantLawSpec: density_terms must be >= 1");
  }
  const double q = jump_law.essential_sup();
  if (q < 1.0) {
    // Mean of the neglected tail 2 sum_{n>N} q^{2n} E_n.
    const double tail = 2.0 * std::pow(q, 2.0 * (truncation_depth + 1)) /
                        (1.0 - q * q);
    if (!(tail < 1e-12)) {
      throw std::invalid_argument(
          "InvariantLawSpec: truncation_depth too small for a 1e-12 tail");
    }
  }
  // q == 1: no geometric tail bound exists; the caller owns the depth choice
  // and the bias is governed by the E(Q^2)^n decay of the term means.
}

InvariantLawSpec InvariantLawSpec::with_default_depth(MultiplicativeLaw law,
                                                      int density_terms) {
  const int depth = default_truncation_depth(law);
  return InvariantLawSpec(std::move(law), depth, density_terms);
}

int default_truncation_depth(const MultiplicativeLaw& law) {
  const double q = law.essential_sup();
  if (q >= 1.0) {
    throw std::invalid_argument(
        "default_truncation_depth: essential sup is 1, set the depth explicitly");
  }
  if (q == 0.0) return 1;
  const double q2 = q * q;
  double tail = q2 / (1.0 - q2);  // q^{2(N+1)}/(1-q^2) at N = 0
  int depth = 0;
  while (!(tail < 5e-13) && depth < 100000) {
    tail *= q2;
    ++depth;
  }
  return std::max(depth, 1);
}

double sample_invariant(const InvariantLawSpec& spec, RngStream& stream) {
  double coeff = 1.0;  // Q_1^2 ... Q_n^2
  double acc = 0.0;
  for (int n = 0; n < spec.truncation_depth; ++n) {
    const double q = spec.jump_law.sample(stream);
    coeff *= q * q;
    if (coeff == 0.0) break;
    acc += coeff * stream.exponential();
  }
  return std::sqrt(2.0 * acc);
}

MeanStderr mgf_invariant(double s, const MultiplicativeLaw& law,
                         std::size_t n_mc, int depth, RngStream& stream) {
  if (depth < 1) {
    throw std::invalid_argument("mgf_invariant: depth must be >= 1");
  }
  if (s == 0.0) return MeanStderr{1.0, 0.0};
  const double q = law.essential_sup();
  if (s > 0.0 && 2.0 * s * q * q >= 1.0) {
    throw DivergentMgf("mgf_invariant: 2*s*q^2 >= 1, the exponential moment is infinite");
  }
  if (law.is_dirac()) {
    const double d2 = law.dirac_delta() * law.dirac_delta();
    double coeff = 1.0;
    double product = 1.0;
    for (int n = 1; n <= depth; ++n) {
      coeff *= d2;
      const double factor = 1.0 - 2.0 * s * coeff;
      product *= factor;
      if (std::abs(2.0 * s * coeff) < 1e-18) break;
    }
    return MeanStderr{1.0 / product, 0.0};
  }
  if (n_mc == 0) {
    throw std::invalid_argument("mgf_invariant: n_mc must be positive");
  }
  RunningStats stats;
  for (std::size_t i = 0; i < n_mc; ++i) {
    double coeff = 1.0;
    double product = 1.0;
    for (int n = 1; n <= depth; ++n) {
      const double qn = law.sample(stream);
      coeff *= qn * qn;
      if (coeff == 0.0) break;
      product *= 1.0 - 2.0 * s * coeff;
      if (std::abs(2.0 * s * coeff) < 1e-18) break;
    }
    stats.add(1.0 / product);
  }
  return MeanStderr{stats.mean, stats.stderr_of_mean()};
}

DensitySeriesEval invariant_density_series(double x, double delta,
                                           int max_terms) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("invariant_density_series: delta outside (0,1)");
  }
  if (!(x >= 0.0)) {
    throw std::invalid_argument("invariant_density_series: x must be nonnegative");
  }
  if (max_terms < 1) {
    throw std::invalid_argument("invariant_density_series: max_terms must be >= 1");
  }

  const double r = 1.0 / (delta * delta);  // delta^{-2} > 1

  // Normalisation 1 / prod_{n>=1} (1 - delta^{2n}).
  double norm = 1.0;
  double d2n = delta * delta;
  while (d2n > 1e-18) {
    norm *= 1.0 - d2n;
    d2n *= delta * delta;
  }
  const double z = 1.0 / norm;

  DensitySeriesEval eval;
  if (x == 0.0) {  // every term carries a factor x
    eval.relative_ok = true;
    return eval;
  }

  // Kahan-compensated alternating sum, ascending n. coeff_n =
  // delta^{-2n} / prod_{k<n} (delta^{-2k} - 1) collapses super-exponentially
  // once delta^{-2(n-1)} - 1 outgrows delta^{-2}.
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;
  double coeff = 1.0;       // running coefficient magnitude
  double rn = 1.0;          // delta^{-2n}
  double prev_mag = std::numeric_limits<double>::infinity();
  double truncation = std::numeric_limits<double>::infinity();
  bool tail_bounded = false;
  int n = 0;
  while (n < max_terms) {
    ++n;
    coeff *= r;
    if (n > 1) coeff /= (rn - 1.0);  // rn currently holds delta^{-2(n-1)}
    rn *= r;
    const double term_mag = coeff * x * std::exp(-0.5 * rn * x * x);
    const double term = (n % 2 == 1) ? term_mag : -term_mag;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += term_mag;
    // Estimate of the next term; once magnitudes shrink the alternating tail
    // is bounded by it. While coefficients still grow (delta close to 1) the
    // tail is not yet under control and we must keep summing.
    const double next_mag =
        coeff * r / (rn - 1.0) * x * std::exp(-0.5 * rn * r * x * x);
    tail_bounded = term_mag <= prev_mag && next_mag <= term_mag;
    truncation = next_mag;
    prev_mag = term_mag;
    if (tail_bounded &&
        (truncation <= 1e-16 * std::abs(sum) || truncation < 1e-300)) {
      break;
    }
  }
  if (!tail_bounded) truncation = std::numeric_limits<double>::infinity();

  const double eps = std::numeric_limits<double>::epsilon();
  const double roundoff = 4.0 * eps * abs_sum;
  eval.value = z * sum;
  eval.abs_error = z * (roundoff + truncation);
  eval.terms = n;
  eval.relative_ok =
      std::abs(sum) > 0.0 && (roundoff + truncation) <= 1e-13 * std::abs(sum);
  if (eval.value < 0.0 && -eval.value <= eval.abs_error) eval.value = 0.0;
  return eval;
}

double invariant_density(double x, double delta, int max_terms) {
  const DensitySeriesEval eval = invariant_density_series(x, delta, max_terms);
  if (!eval.relative_ok) {
    throw NonConvergent(
        "invariant_density: cancellation prevents the requested relative "
        "accuracy at this x (value " +
        std::to_string(eval.value) + ", abs error bound " +
        std::to_string(eval.abs_error) + ")");
  }
  return eval.value;
}

double invariant_density_cutoff(double delta) {
  // The slowest mode is x exp(-delta^{-2} x^2 / 2); solve for ~1e-22.
  return std::sqrt(2.0 * 51.0) * delta + 1.0;
}

double invariant_density_integral(double delta, double tol) {
  const double upper = invariant_density_cutoff(delta);
  return adaptive_simpson(
      [delta](double x) { return invariant_density_series(x, delta).value; },
      0.0, upper, tol);
}

double invariant_expectation(const std::function<double(double)>& f,
                             double delta, double tol) {
  const double upper = invariant_density_cutoff(delta);
  return adaptive_simpson(
      [delta, &f](double x) {
        return f(x) * invariant_density_series(x, delta).value;
      },
      0.0, upper, tol);
}

InvariantCdf::InvariantCdf(double delta, int grid_cells) {
  if (grid_cells < 16) {
    throw std::invalid_argument("InvariantCdf: grid too coarse");
  }
  upper_ = invariant_density_cutoff(delta);
  cell_ = upper_ / grid_cells;
  cdf_.assign(grid_cells + 1, 0.0);
  // 5-point Gauss-Legendre per cell; the density is smooth so this is far
  // below the interpolation error already.
  static const double kNodes[5] = {-0.9061798459386640, -0.5384693101056831,
                                   0.0, 0.5384693101056831,
                                   0.9061798459386640};
  static const double kWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                     0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};
  double acc = 0.0;
  for (int c = 0; c < grid_cells; ++c) {
    const double a = c * cell_;
    const double mid = a + 0.5 * cell_;
    const double half = 0.5 * cell_;
    double cell_mass = 0.0;
    for (int k = 0; k < 5; ++k) {
      cell_mass += kWeights[k] *
                   invariant_density_series(mid + half * kNodes[k], delta).value;
    }
    acc += cell_mass * half;
    cdf_[c + 1] = acc;
  }
}

double InvariantCdf::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= upper_) return 1.0;
  const double pos = x / cell_;
  const std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(pos), cdf_.size() - 2);
  const double frac = pos - static_cast<double>(i);
  const double v = cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  return std::clamp(v, 0.0, 1.0);
}

double ergodic_average(const std::function<double(double)>& f, double x0,
                       std::size_t n, const MultiplicativeLaw& law,
                       RngStream& stream) {
  if (n == 0) {
    throw std::invalid_argument("ergodic_average: n must be >= 1");
  }
  if (!(x0 >= 0.0)) {
    throw std::invalid_argument("ergodic_average: x0 must be nonnegative");
  }
  double x = x0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = stream.exponential();
    const double q = law.sample(stream);
    x = chain_step(x, e, q);
    acc += f(x);
  }
  return acc / static_cast<double>(n);
}

}  // namespace tcpwin
