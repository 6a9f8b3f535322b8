#include "tcpwin/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tcpwin {

MeanStderr mean_with_stderr(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("mean_with_stderr: empty input");
  }
  RunningStats stats;
  for (double v : values) stats.add(v);
  return MeanStderr{stats.mean, stats.stderr_of_mean()};
}

void RunningStats::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

double RunningStats::variance() const {
  if (n < 2) return 0.0;
  return m2 / static_cast<double>(n - 1);
}

double RunningStats::stderr_of_mean() const {
  if (n < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n));
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw std::invalid_argument("EmpiricalDistribution: empty sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::mean() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
         static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("EmpiricalDistribution::quantile: p outside [0,1]");
  }
  if (p == 0.0) return samples_.front();
  const std::size_t n = samples_.size();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(n)));
  return samples_[std::min(k, n) - 1];
}

double wasserstein_p(const EmpiricalDistribution& a,
                     const EmpiricalDistribution& b, double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("wasserstein_p: p must be >= 1");
  }
  if (a.size() != b.size()) {
    throw std::invalid_argument(
        "wasserstein_p: clouds must have equal sizes (subsample first)");
  }
  const std::vector<double>& xs = a.samples();
  const std::vector<double>& ys = b.samples();
  const std::size_t n = xs.size();
  double acc = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(xs[i] - ys[i]);
    return acc / static_cast<double>(n);
  }
  if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = xs[i] - ys[i];
      acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::pow(std::abs(xs[i] - ys[i]), p);
  }
  return std::pow(acc / static_cast<double>(n), 1.0 / p);
}

EmpiricalDistribution subsample(const EmpiricalDistribution& dist, std::size_t m,
                                RngStream& stream) {
  const std::size_t n = dist.size();
  if (m == 0 || m > n) {
    throw std::invalid_argument("subsample: need 0 < m <= n");
  }
  // Partial Fisher-Yates over an index vector.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(stream.uniform01() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
    out[i] = dist.samples()[idx[i]];
  }
  return EmpiricalDistribution(std::move(out));
}

double w1_dual_check(
    const EmpiricalDistribution& a, const EmpiricalDistribution& b,
    std::span<const std::function<double(double)>> test_functions) {
  const double lo = std::min(a.samples().front(), b.samples().front());
  const double hi = std::max(a.samples().back(), b.samples().back());
  const int grid = 1024;
  const double h = (hi > lo) ? (hi - lo) / grid : 1.0;
  for (const auto& f : test_functions) {
    double prev = f(lo);
    for (int i = 1; i <= grid; ++i) {
      const double x = lo + h * i;
      const double cur = f(x);
      if (std::abs(cur - prev) > h * (1.0 + 1e-9) + 1e-12) {
        throw std::invalid_argument(
            "w1_dual_check: test function is not 1-Lipschitz on the sample range");
      }
      prev = cur;
    }
  }
  auto integral = [](const EmpiricalDistribution& d,
                     const std::function<double(double)>& f) {
    double acc = 0.0;
    for (double x : d.samples()) acc += f(x);
    return acc / static_cast<double>(d.size());
  };
  double gap = 0.0;
  for (const auto& f : test_functions) {
    gap = std::max(gap, std::abs(integral(a, f) - integral(b, f)));
  }
  return gap;
}

std::vector<double> deviation_frequency(std::span<const double> runs,
                                        double center, double offset,
                                        std::span<const double> u_grid) {
  if (runs.empty()) {
    throw std::invalid_argument("deviation_frequency: no runs");
  }
  std::vector<double> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    std::size_t hits = 0;
    for (double r : runs) {
      // strict: a run sitting exactly on the threshold is not a deviation,
      // so at u = offset = 0 the frequency is 1 minus the exact-hit fraction
      if (std::abs(r - center) > u + offset) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(runs.size()));
  }
  return out;
}

double w1_to_dirac(double x, const EmpiricalDistribution& dist) {
  double acc = 0.0;
  for (double y : dist.samples()) acc += std::abs(x - y);
  return acc / static_cast<double>(dist.size());
}

double ks_statistic(const EmpiricalDistribution& a,
                    const EmpiricalDistribution& b) {
  const std::vector<double>& xs = a.samples();
  const std::vector<double>& ys = b.samples();
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic_vs_cdf(const EmpiricalDistribution& a,
                           const std::function<double(double)>& cdf) {
  const std::vector<double>& xs = a.samples();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double acc = 0.0;
  for (int k = 1; k <= 128; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  const double en = static_cast<double>(n) * static_cast<double>(m) /
                    static_cast<double>(n + m);
  return kolmogorov_tail(std::sqrt(en) * d);
}

namespace {

// Multinomial bootstrap resample of a sorted cloud; output stays sorted
// because values are emitted in source order.
void resample_sorted(const std::vector<double>& sorted, RngStream& stream,
                     std::vector<std::uint32_t>& counts,
                     std::vector<double>& out) {
  const std::size_t n = sorted.size();
  counts.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i =
        std::min(n - 1, static_cast<std::size_t>(stream.uniform01() *
                                                 static_cast<double>(n)));
    ++counts[i];
  }
  out.clear();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t c = 0; c < counts[i]; ++c) out.push_back(sorted[i]);
  }
}

double wp_of_sorted(const std::vector<double>& xs, const std::vector<double>& ys,
                    double p) {
  const std::size_t n = xs.size();
  double acc = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(xs[i] - ys[i]);
    return acc / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::pow(std::abs(xs[i] - ys[i]), p);
  }
  return std::pow(acc / static_cast<double>(n), 1.0 / p);
}

}  // namespace

double bootstrap_stderr_wp(const EmpiricalDistribution& a,
                           const EmpiricalDistribution& b, double p,
                           int resamples, RngStream& stream) {
  if (resamples < 2) {
    throw std::invalid_argument("bootstrap_stderr_wp: need >= 2 resamples");
  }
  if (a.size() != b.size()) {
    throw std::invalid_argument("bootstrap_stderr_wp: clouds of equal size only");
  }
  std::vector<std::uint32_t> counts;
  std::vector<double> ra;
  std::vector<double> rb;
  RunningStats stats;
  for (int r = 0; r < resamples; ++r) {
    resample_sorted(a.samples(), stream, counts, ra);
    resample_sorted(b.samples(), stream, counts, rb);
    stats.add(wp_of_sorted(ra, rb, p));
  }
  return std::sqrt(stats.variance());
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("ols_fit: need >= 3 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("ols_fit: degenerate abscissae");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

LinearFit wls_fit(std::span<const double> x, std::span<const double> y,
                  std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 3) {
    throw std::invalid_argument("wls_fit: need >= 3 paired points");
  }
  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw std::invalid_argument("wls_fit: sigmas must be positive");
    }
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
  }
  const double mx = swx / sw;
  const double my = swy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("wls_fit: degenerate abscissae");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.slope_stderr = std::sqrt(1.0 / sxx);
  return fit;
}

}  // namespace tcpwin
