#ifndef TCPWIN_BOUNDS_HPP
#define TCPWIN_BOUNDS_HPP

#include <map>
#include <string>
#include <utility>

#include "tcpwin/errors.hpp"
#include "tcpwin/jump_law.hpp"

namespace tcpwin {

// ---- Closed-form evaluators -------------------------------------------
// Pure and total on their stated domains; each matches one quantitative
// estimate verified by the experiments.

// E(Q^p)^{n/p} * w0: per-step contraction of the embedded chain in W_p.
double embedded_contraction_bound(double p, int n, const MultiplicativeLaw& law,
                                  double w0);

// exp(-a kappa1 t) * w0: exponential decay for the shifted-rate process.
double continuous_decay_bound(double a, double kappa1, double t, double w0);

// 1 / (d tanh(d t)) with d = sqrt(kappa1): uniform-in-x bound on the process
// mean, from the Riccati comparison beta' = 1 - kappa1 beta^2.
double riccati_mean_bound(double kappa1, double t);

// 2 e^{a kappa1 s} / (d tanh(d s)) * e^{-a kappa1 t}, 0 < s < t: decay bound
// uniform over both initial laws.
double strong_ergodicity_bound(double a, double kappa1, double s, double t);

// d0 / (1 + (1+h) d0 t): algebraic decay for the unshifted process with a
// Dirac(h) factor law.
double real_tcp_bound(double h, double d0, double t);

// theta_p = lambda (1 - E(Q^p)).
double theta_p(double lambda, double p, const MultiplicativeLaw& law);

// w0 * exp(-theta_p t / p): decay under a constant jump rate.
double constant_rate_decay(double lambda, double p, const MultiplicativeLaw& law,
                           double t, double w0);

// Exact transient moment E(X_t^n | X_0 = x) for the constant-rate process:
//   n!/prod_k theta_k
//   + n! sum_{m=1..n} ( sum_{k=0..m} x^k/k! prod_{j=k..n, j!=m} 1/(theta_j-theta_m) ) e^{-theta_m t}
// with theta_0 = 0 entering the k = 0 products. Throws DegenerateSpectrum
// when two rates nearly coincide (the partial fractions divide by their
// differences); the caller should fall back to Monte Carlo.
double moments_constant_rate(int n, double x, double lambda,
                             const MultiplicativeLaw& law, double t);

// Log-Sobolev constants of the Dirac(delta) embedded chain:
// first = 2 delta^2 (1 - delta^{2n}) / (1 - delta^2) for the n-step kernel,
// second = 2 delta^2 / (1 - delta^2) for the invariant law.
std::pair<double, double> gross_constants(double delta, int n);

// min(1, 2 exp(-n (1 - delta^2) u^2 / (2 delta^2))): Gaussian deviation bound
// for ergodic averages of 1-Lipschitz observables.
double concentration_bound(double delta, std::size_t n, double u);

// ---- Bound vs Monte Carlo reports --------------------------------------

// A named theoretical value paired with a Monte Carlo estimate. `satisfied`
// is always computed here, never hand-set; the uniform rule is 3 standard
// errors (plus an optional absolute tolerance for deterministic checks).
struct BoundReport {
  std::string name;
  std::map<std::string, double> parameters;
  double theoretical_value = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  std::string check;  // "mc<=bound+3se" or "|mc-theoretical|<=3se"
  bool satisfied = false;

  // mc <= theoretical + 3 se (+ abs_slack).
  static BoundReport upper(std::string name,
                           std::map<std::string, double> parameters,
                           double theoretical, double mc, double stderr_of_mc,
                           double abs_slack = 1e-12);

  // |mc - theoretical| <= 3 se (+ abs_slack).
  static BoundReport match(std::string name,
                           std::map<std::string, double> parameters,
                           double theoretical, double mc, double stderr_of_mc,
                           double abs_slack = 1e-12);

  std::string to_json() const;  // single object, sorted keys
};

}  // namespace tcpwin

#endif  // TCPWIN_BOUNDS_HPP
