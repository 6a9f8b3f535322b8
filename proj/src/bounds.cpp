#include "tcpwin/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace tcpwin {

double embedded_contraction_bound(double p, int n, const MultiplicativeLaw& law,
                                  double w0) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("embedded_contraction_bound: p must be >= 1");
  }
  if (n < 0) {
    throw std::invalid_argument("embedded_contraction_bound: n must be >= 0");
  }
  return std::pow(law.moment(p), static_cast<double>(n) / p) * w0;
}

double continuous_decay_bound(double a, double kappa1, double t, double w0) {
  if (!(a > 0.0) || !(kappa1 > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("continuous_decay_bound: bad arguments");
  }
  return std::exp(-a * kappa1 * t) * w0;
}

double riccati_mean_bound(double kappa1, double t) {
  if (!(kappa1 > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("riccati_mean_bound: need kappa1 > 0, t > 0");
  }
  const double d = std::sqrt(kappa1);
  return 1.0 / (d * std::tanh(d * t));
}

double strong_ergodicity_bound(double a, double kappa1, double s, double t) {
  if (!(a > 0.0) || !(kappa1 > 0.0)) {
    throw std::invalid_argument("strong_ergodicity_bound: need a, kappa1 > 0");
  }
  if (!(s > 0.0 && t > s)) {
    throw std::invalid_argument("strong_ergodicity_bound: need 0 < s < t");
  }
  return 2.0 * std::exp(a * kappa1 * s) * riccati_mean_bound(kappa1, s) *
         std::exp(-a * kappa1 * t);
}

double real_tcp_bound(double h, double d0, double t) {
  if (!(h > 0.0 && h < 1.0)) {
    throw std::invalid_argument("real_tcp_bound: h must lie in (0,1)");
  }
  if (!(d0 >= 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("real_tcp_bound: d0, t must be nonnegative");
  }
  return d0 / (1.0 + (1.0 + h) * d0 * t);
}

double theta_p(double lambda, double p, const MultiplicativeLaw& law) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("theta_p: lambda must be > 0");
  }
  return lambda * (1.0 - law.moment(p));
}

double constant_rate_decay(double lambda, double p, const MultiplicativeLaw& law,
                           double t, double w0) {
  if (!(p >= 1.0) || !(t >= 0.0)) {
    throw std::invalid_argument("constant_rate_decay: bad arguments");
  }
  return w0 * std::exp(-theta_p(lambda, p, law) * t / p);
}

double moments_constant_rate(int n, double x, double lambda,
                             const MultiplicativeLaw& law, double t) {
  if (n < 0) {
    throw std::invalid_argument("moments_constant_rate: n must be >= 0");
  }
  if (!(x >= 0.0) || !(lambda > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("moments_constant_rate: bad arguments");
  }
  if (n == 0) return 1.0;

  // theta_0 = 0 participates in the k = 0 partial-fraction products.
  std::vector<double> theta(n + 1);
  theta[0] = 0.0;
  for (int k = 1; k <= n; ++k) theta[k] = theta_p(lambda, k, law);
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (std::abs(theta[i] - theta[j]) < 1e-9) {
        throw DegenerateSpectrum(
            "moments_constant_rate: theta_" + std::to_string(i) +
            " and theta_" + std::to_string(j) +
            " nearly coincide; fall back to Monte Carlo");
      }
    }
  }

  double n_factorial = 1.0;
  for (int k = 2; k <= n; ++k) n_factorial *= k;

  double value = n_factorial;
  for (int k = 1; k <= n; ++k) value /= theta[k];

  for (int m = 1; m <= n; ++m) {
    double inner = 0.0;
    double x_pow = 1.0;  // x^k / k!, empty product convention at k = 0
    for (int k = 0; k <= m; ++k) {
      if (k > 0) x_pow *= x / k;
      double prod = 1.0;
      for (int j = k; j <= n; ++j) {
        if (j == m) continue;
        prod /= theta[j] - theta[m];
      }
      inner += x_pow * prod;
    }
    value += n_factorial * inner * std::exp(-theta[m] * t);
  }
  return value;
}

std::pair<double, double> gross_constants(double delta, int n) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("gross_constants: delta must lie in (0,1)");
  }
  if (n < 1) {
    throw std::invalid_argument("gross_constants: n must be >= 1");
  }
  const double d2 = delta * delta;
  const double invariant = 2.0 * d2 / (1.0 - d2);
  const double kernel_n = invariant * (1.0 - std::pow(d2, n));
  return {kernel_n, invariant};
}

double concentration_bound(double delta, std::size_t n, double u) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("concentration_bound: delta must lie in (0,1)");
  }
  if (!(u >= 0.0)) {
    throw std::invalid_argument("concentration_bound: u must be nonnegative");
  }
  const double d2 = delta * delta;
  const double exponent =
      -static_cast<double>(n) * (1.0 - d2) * u * u / (2.0 * d2);
  return std::min(1.0, 2.0 * std::exp(exponent));
}

BoundReport BoundReport::upper(std::string name,
                               std::map<std::string, double> parameters,
                               double theoretical, double mc,
                               double stderr_of_mc, double abs_slack) {
  BoundReport report;
  report.name = std::move(name);
  report.parameters = std::move(parameters);
  report.theoretical_value = theoretical;
  report.mc_estimate = mc;
  report.mc_stderr = stderr_of_mc;
  report.check = "mc<=bound+3se";
  report.satisfied = mc <= theoretical + 3.0 * stderr_of_mc + abs_slack;
  return report;
}

BoundReport BoundReport::match(std::string name,
                               std::map<std::string, double> parameters,
                               double theoretical, double mc,
                               double stderr_of_mc, double abs_slack) {
  BoundReport report;
  report.name = std::move(name);
  report.parameters = std::move(parameters);
  report.theoretical_value = theoretical;
  report.mc_estimate = mc;
  report.mc_stderr = stderr_of_mc;
  report.check = "|mc-theoretical|<=3se";
  report.satisfied =
      std::abs(mc - theoretical) <= 3.0 * stderr_of_mc + abs_slack;
  return report;
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : parameters) params[key] = value;
  j["parameters"] = params;
  j["theoretical_value"] = theoretical_value;
  j["mc_estimate"] = mc_estimate;
  j["mc_stderr"] = mc_stderr;
  j["check"] = check;
  j["satisfied"] = satisfied;
  return j.dump();
}

}  // namespace tcpwin
