#ifndef TCPWIN_EMPIRICAL_HPP
#define TCPWIN_EMPIRICAL_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tcpwin/rng.hpp"

namespace tcpwin {

struct MeanStderr {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

MeanStderr mean_with_stderr(std::span<const double> values);

// Welford accumulator; mergeable, so per-block statistics can be reduced in
// block order independently of thread scheduling.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  double variance() const;  // unbiased
  double stderr_of_mean() const;
};

// A sorted sample cloud with uniform weights.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples);  // sorts

  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double mean() const;

  // Left-continuous empirical quantile: the ceil(p*n)-th order statistic.
  double quantile(double p) const;

 private:
  std::vector<double> samples_;
};

// Exact W_p between two equal-size empirical measures: the comonotone
// (sorted) coupling is optimal in dimension one, so
// W_p = ( (1/n) sum |a_(i) - b_(i)|^p )^(1/p).
// Clouds of different sizes are refused; use subsample() first.
double wasserstein_p(const EmpiricalDistribution& a,
                     const EmpiricalDistribution& b, double p);

// Uniform subsample without replacement down to m points (recorded-seed mode
// for unequal clouds).
EmpiricalDistribution subsample(const EmpiricalDistribution& dist, std::size_t m,
                                RngStream& stream);

// max_f |int f dA - int f dB| over the supplied test functions, each checked
// to be 1-Lipschitz on the pooled sample range by finite differences
// (throws std::invalid_argument otherwise). The gap never exceeds W_1.
double w1_dual_check(
    const EmpiricalDistribution& a, const EmpiricalDistribution& b,
    std::span<const std::function<double(double)>> test_functions);

// For each u in u_grid: fraction of runs with |run - center| strictly above
// u + offset.
std::vector<double> deviation_frequency(std::span<const double> runs,
                                        double center, double offset,
                                        std::span<const double> u_grid);

// W_1 to a Dirac mass is a plain expectation: (1/n) sum |x - y_i|.
double w1_to_dirac(double x, const EmpiricalDistribution& dist);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_A - F_B|.
double ks_statistic(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

// One-sample KS statistic against a continuous CDF.
double ks_statistic_vs_cdf(const EmpiricalDistribution& a,
                           const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

// Asymptotic two-sample p-value: Q(sqrt(nm/(n+m)) * d).
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

// Nonparametric bootstrap standard error of W_p(A,B) (multinomial resampling
// of both clouds).
double bootstrap_stderr_wp(const EmpiricalDistribution& a,
                           const EmpiricalDistribution& b, double p,
                           int resamples, RngStream& stream);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // OLS, residual-based
};

LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

// Weighted least squares with known per-point standard deviations; the slope
// stderr is exact under independent errors, which plain OLS gets wrong when
// the noise grows along the abscissa.
LinearFit wls_fit(std::span<const double> x, std::span<const double> y,
                  std::span<const double> sigma);

}  // namespace tcpwin

#endif  // TCPWIN_EMPIRICAL_HPP
