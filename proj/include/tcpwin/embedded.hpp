#ifndef TCPWIN_EMBEDDED_HPP
#define TCPWIN_EMBEDDED_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "tcpwin/empirical.hpp"
#include "tcpwin/errors.hpp"
#include "tcpwin/jump_law.hpp"
#include "tcpwin/rng.hpp"

namespace tcpwin {

// One step of the post-jump chain: x -> Q * sqrt(x^2 + 2E). The chain is the
// square root of an AR(1) process with random coefficients Q^2 and
// innovations 2 Q^2 E.
double chain_step(double x, double e, double q);

// Monte Carlo estimate of (Kf)(x) = E[ f(Q sqrt(x^2 + 2E)) ].
MeanStderr kernel_expectation(const std::function<double(double)>& f, double x,
                              const MultiplicativeLaw& law, std::size_t n_mc,
                              RngStream& stream);

// Sampler of the invariant law: the truncated series
// sqrt(2 sum_{n<=N} Q_1^2...Q_n^2 E_n).
struct InvariantLawSpec {
  MultiplicativeLaw jump_law;
  int truncation_depth;   // N >= 1
  int density_terms = 64; // M, Dirac density series only

  InvariantLawSpec(MultiplicativeLaw law, int depth, int density_terms = 64);

  // Depth chosen so the neglected geometric tail has mean below 5e-13.
  static InvariantLawSpec with_default_depth(MultiplicativeLaw law,
                                             int density_terms = 64);
};

// Smallest N with q^{2(N+1)} / (1 - q^2) < 5e-13, q the essential sup of Q.
// For q = 1 (e.g. Uniform01) there is no geometric tail: the depth must be
// chosen explicitly and the bias documented through the E(Q^2)^n decay of
// the term means; this function refuses.
int default_truncation_depth(const MultiplicativeLaw& law);

double sample_invariant(const InvariantLawSpec& spec, RngStream& stream);

// E[exp(s X_inf^2)] = E[ prod_{n>=1} (1 - 2 s Q_1^2...Q_n^2)^{-1} ].
// Deterministic product for a Dirac law (stderr 0); Monte Carlo otherwise.
// Throws DivergentMgf when 2 s q^2 >= 1.
MeanStderr mgf_invariant(double s, const MultiplicativeLaw& law,
                         std::size_t n_mc, int depth, RngStream& stream);

// One evaluation of the invariant-density series for H = Dirac(delta):
//   Z^-1 sum_n (-1)^{n-1} delta^{-2n} / prod_{k<n} (delta^{-2k} - 1)
//         * x exp(-delta^{-2n} x^2 / 2),
// Kahan-summed in increasing n. The alternating coefficients cancel almost
// exactly for small x, so alongside the value we report an absolute roundoff
// bound and whether a ~1e-13 relative accuracy could be certified.
struct DensitySeriesEval {
  double value = 0.0;
  double abs_error = 0.0;  // roundoff + truncation bound
  int terms = 0;
  bool relative_ok = false;
};

DensitySeriesEval invariant_density_series(double x, double delta,
                                           int max_terms = 64);

// Strict variant: throws NonConvergent when the series cannot be certified
// to ~1e-13 relative accuracy at this x (severe cancellation near x = 0).
double invariant_density(double x, double delta, int max_terms = 64);

// Abscissa beyond which the delta-density is below ~1e-22.
double invariant_density_cutoff(double delta);

// integral of the density over [0, cutoff] by adaptive quadrature.
double invariant_density_integral(double delta, double tol = 1e-10);

// integral of f against the density by adaptive quadrature.
double invariant_expectation(const std::function<double(double)>& f,
                             double delta, double tol = 1e-10);

// Quadrature CDF of the Dirac-invariant density, precomputed on a uniform
// grid (Gauss-Legendre per cell) and interpolated linearly.
class InvariantCdf {
 public:
  InvariantCdf(double delta, int grid_cells = 8192);
  double operator()(double x) const;
  double upper() const { return upper_; }

 private:
  double upper_;
  double cell_;
  std::vector<double> cdf_;
};

// (1/n) sum_{k=1..n} f(X_k) along one chain trajectory from X_0 = x0.
double ergodic_average(const std::function<double(double)>& f, double x0,
                       std::size_t n, const MultiplicativeLaw& law,
                       RngStream& stream);

}  // namespace tcpwin

#endif  // TCPWIN_EMBEDDED_HPP
