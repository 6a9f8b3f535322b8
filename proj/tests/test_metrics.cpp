#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "tcpwin/empirical.hpp"
#include "test_util.hpp"

using namespace tcpwin;

namespace {

std::vector<double> random_cloud(RngStream& stream, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * stream.uniform01();
  return v;
}

}  // namespace

TEST_CASE("wasserstein_p: hand values") {
  const EmpiricalDistribution a({0.0, 1.0});
  const EmpiricalDistribution b({0.0, 3.0});
  // optimal matching keeps 0->0, 1->3: (0 + 2)/2 = 1.
  CHECK(wasserstein_p(a, b, 1.0) == doctest::Approx(1.0));
  CHECK(test::brute_force_wp({0.0, 1.0}, {0.0, 3.0}, 1.0) ==
        doctest::Approx(1.0));

  const EmpiricalDistribution c({2.0, 2.0, 2.0});
  const EmpiricalDistribution d({5.0, 5.0, 5.0});
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK(wasserstein_p(c, d, p) == doctest::Approx(3.0));
  }
  CHECK(wasserstein_p(a, a, 2.0) == 0.0);
}

TEST_CASE("wasserstein_p input validation") {
  const EmpiricalDistribution a({0.0, 1.0});
  const EmpiricalDistribution b({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(wasserstein_p(a, b, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein_p(a, a, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalDistribution({}), std::invalid_argument);
}

TEST_CASE("sorted coupling equals the exhaustive assignment on small clouds") {
  RngStream stream(101, 0);
  const double ps[] = {1.0, 1.5, 2.0, 3.0};
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(stream.uniform01() * 6.0);
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::floor(stream.uniform01() * 10.0);
      b[i] = std::floor(stream.uniform01() * 10.0);
    }
    const double p = ps[trial % 4];
    const double fast =
        wasserstein_p(EmpiricalDistribution(a), EmpiricalDistribution(b), p);
    const double brute = test::brute_force_wp(a, b, p);
    CHECK(std::abs(fast - brute) < 1e-12);
  }
}

TEST_CASE("metric axioms and monotonicity in p on random clouds") {
  RngStream stream(103, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const EmpiricalDistribution a(random_cloud(stream, 50, 3.0));
    const EmpiricalDistribution b(random_cloud(stream, 50, 3.0));
    const EmpiricalDistribution c(random_cloud(stream, 50, 3.0));
    const double ab = wasserstein_p(a, b, 1.0);
    const double ba = wasserstein_p(b, a, 1.0);
    CHECK(ab == ba);  // symmetry, exactly
    const double ac = wasserstein_p(a, c, 1.0);
    const double cb = wasserstein_p(c, b, 1.0);
    CHECK(ab <= ac + cb + 1e-12);  // triangle
    CHECK(wasserstein_p(a, a, 1.0) == 0.0);
    // Jensen: p -> W_p is nondecreasing
    CHECK(ab <= wasserstein_p(a, b, 2.0) + 1e-12);
    CHECK(wasserstein_p(a, b, 2.0) <= wasserstein_p(a, b, 3.0) + 1e-12);
  }
}

TEST_CASE("w1 dual gap: hand values and domination by the primal") {
  const std::function<double(double)> identity = [](double x) { return x; };
  const EmpiricalDistribution a({2.0});
  const EmpiricalDistribution b({5.5});
  const std::function<double(double)> fs[] = {identity};
  CHECK(w1_dual_check(a, b, fs) == doctest::Approx(3.5));
  CHECK(w1_dual_check(a, a, fs) == 0.0);

  // random piecewise-linear 1-Lipschitz functions never beat the primal
  RngStream stream(107, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const EmpiricalDistribution x(random_cloud(stream, 100, 4.0));
    const EmpiricalDistribution y(random_cloud(stream, 100, 4.0));
    // slopes in [-1,1] on 8 knots spanning the range
    std::vector<double> slopes(8);
    for (double& s : slopes) s = 2.0 * stream.uniform01() - 1.0;
    const std::function<double(double)> f = [slopes](double v) {
      const double knot = 0.5;  // knots every 0.5 on [0,4]
      double acc = 0.0;
      double pos = 0.0;
      for (const double s : slopes) {
        const double seg = std::clamp(v - pos, 0.0, knot);
        acc += s * seg;
        pos += knot;
      }
      return acc;
    };
    const std::function<double(double)> fs2[] = {f};
    const double dual = w1_dual_check(x, y, fs2);
    CHECK(dual <= wasserstein_p(x, y, 1.0) + 1e-12);
  }
}

TEST_CASE("w1 dual gap rejects non-Lipschitz test functions") {
  const EmpiricalDistribution a({0.0, 1.0, 2.0});
  const EmpiricalDistribution b({0.5, 1.5, 2.5});
  const std::function<double(double)> steep = [](double x) { return 3.0 * x; };
  const std::function<double(double)> fs[] = {steep};
  CHECK_THROWS_AS(w1_dual_check(a, b, fs), std::invalid_argument);
}

TEST_CASE("deviation_frequency counts tail exceedances") {
  const std::vector<double> runs = {0.9, 1.0, 1.1, 1.4};
  const std::vector<double> us = {0.0, 0.15, 0.3, 10.0};
  const auto freqs = deviation_frequency(runs, 1.0, 0.0, us);
  CHECK(freqs[0] == doctest::Approx(0.75));  // the exact hit does not count
  CHECK(freqs[1] == doctest::Approx(0.25));
  CHECK(freqs[2] == doctest::Approx(0.25));
  CHECK(freqs[3] == 0.0);
  const std::vector<double> single_u = {0.05};
  const auto offset = deviation_frequency(runs, 1.0, 0.25, single_u);
  CHECK(offset[0] == doctest::Approx(0.25));
}

TEST_CASE("w1 to a dirac mass is the mean absolute deviation") {
  const EmpiricalDistribution d({0.0, 2.0, 4.0});
  CHECK(w1_to_dirac(2.0, d) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("two-sample KS: basic behaviour and p-values") {
  const EmpiricalDistribution a({1.0, 2.0, 3.0, 4.0});
  CHECK(ks_statistic(a, a) == 0.0);
  const EmpiricalDistribution b({11.0, 12.0, 13.0, 14.0});
  CHECK(ks_statistic(a, b) == doctest::Approx(1.0));
  CHECK(kolmogorov_tail(0.0) == 1.0);
  CHECK(kolmogorov_tail(10.0) < 1e-12);
  // same law, large samples: the scaled statistic is O(1)
  RngStream stream(109, 0);
  const EmpiricalDistribution x(random_cloud(stream, 20000, 1.0));
  const EmpiricalDistribution y(random_cloud(stream, 20000, 1.0));
  CHECK(ks_two_sample_pvalue(ks_statistic(x, y), 20000, 20000) > 0.01);
  // disjoint laws: decisive rejection
  CHECK(ks_two_sample_pvalue(1.0, 1000, 1000) < 1e-12);
}

TEST_CASE("KS against a continuous CDF") {
  RngStream stream(113, 0);
  const EmpiricalDistribution u(random_cloud(stream, 50000, 1.0));
  const double d =
      ks_statistic_vs_cdf(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(std::sqrt(50000.0) * d < 1.63);  // 1% asymptotic critical value
  const double wrong =
      ks_statistic_vs_cdf(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(std::sqrt(50000.0) * wrong > 1.63);
}

TEST_CASE("bootstrap stderr of W1 scales like 1/sqrt(n)") {
  RngStream gen(127, 0);
  const EmpiricalDistribution small_a(random_cloud(gen, 400, 1.0));
  const EmpiricalDistribution small_b(random_cloud(gen, 400, 1.0));
  const EmpiricalDistribution big_a(random_cloud(gen, 40000, 1.0));
  const EmpiricalDistribution big_b(random_cloud(gen, 40000, 1.0));
  RngStream s1(127, 1);
  RngStream s2(127, 2);
  const double se_small = bootstrap_stderr_wp(small_a, small_b, 1.0, 200, s1);
  const double se_big = bootstrap_stderr_wp(big_a, big_b, 1.0, 200, s2);
  CHECK(se_small > 0.0);
  CHECK(se_big > 0.0);
  CHECK(se_big < se_small);
}

TEST_CASE("subsample produces a sorted sub-cloud of the requested size") {
  RngStream gen(131, 0);
  const EmpiricalDistribution big(random_cloud(gen, 1000, 1.0));
  RngStream s(131, 1);
  const EmpiricalDistribution sub = subsample(big, 250, s);
  CHECK(sub.size() == 250);
  CHECK(std::is_sorted(sub.samples().begin(), sub.samples().end()));
  // every subsampled value appears in the source
  for (double v : sub.samples()) {
    CHECK(std::binary_search(big.samples().begin(), big.samples().end(), v));
  }
  CHECK_THROWS_AS(subsample(big, 0, s), std::invalid_argument);
  CHECK_THROWS_AS(subsample(big, 1001, s), std::invalid_argument);
}

TEST_CASE("quantile access on the sorted cloud") {
  const EmpiricalDistribution d({1.0, 2.0, 3.0, 4.0});
  CHECK(d.quantile(0.0) == 1.0);
  CHECK(d.quantile(0.25) == 1.0);
  CHECK(d.quantile(0.5) == 2.0);
  CHECK(d.quantile(1.0) == 4.0);
  CHECK(d.mean() == doctest::Approx(2.5));
}

TEST_CASE("ols and wls fits recover exact lines") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 - 0.5 * x[i];
  const LinearFit fit = ols_fit(x, y);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.slope_stderr == doctest::Approx(0.0));
  const std::vector<double> sigma = {1.0, 1.0, 2.0, 2.0, 4.0};
  const LinearFit wfit = wls_fit(x, y, sigma);
  CHECK(wfit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(wfit.slope_stderr > 0.0);
}

TEST_CASE("running stats merge matches a single pass") {
  RngStream stream(137, 0);
  std::vector<double> values(1000);
  for (double& v : values) v = stream.exponential();
  RunningStats whole;
  RunningStats left;
  RunningStats right;
  for (std::size_t i = 0; i < values.size(); ++i) {
    whole.add(values[i]);
    (i < 400 ? left : right).add(values[i]);
  }
  left.merge(right);
  CHECK(left.n == whole.n);
  CHECK(left.mean == doctest::Approx(whole.mean).epsilon(1e-13));
  CHECK(left.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
}
