#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "tcpwin/toy_chain.hpp"

using namespace tcpwin;

TEST_CASE("one step from state 1 splits evenly") {
  const DyadicDistribution d = toy_step(DyadicDistribution::dirac_one());
  CHECK(d.prob(0) == doctest::Approx(0.5));
  CHECK(d.prob(1) == doctest::Approx(0.5));
  CHECK(d.moment(1) == 0.75);  // exact dyadic arithmetic
  CHECK(toy_moments(1, 1) == 0.75);
}

TEST_CASE("deep states barely reset") {
  const DyadicDistribution d = toy_step(DyadicDistribution::at_exponent(30));
  CHECK(d.prob(0) == doctest::Approx(std::pow(2.0, -31.0)));
  CHECK(d.prob(31) == doctest::Approx(1.0 - std::pow(2.0, -31.0)));
}

TEST_CASE("support and mass after n steps") {
  DyadicDistribution d = DyadicDistribution::dirac_one();
  for (int n = 1; n <= 200; ++n) {
    d = toy_step(d);
    CHECK(d.support_size() == static_cast<std::size_t>(n) + 1);
    CHECK(std::abs(d.total_mass() - 1.0) < 1e-14);
  }
}

TEST_CASE("moment recursion, decay bound and monotonicity up to n = 200") {
  std::vector<double> e1;
  std::vector<double> e2;
  DyadicDistribution d = DyadicDistribution::dirac_one();
  for (int n = 0; n <= 200; ++n) {
    e1.push_back(d.moment(1));
    e2.push_back(d.moment(2));
    d = toy_step(d);
  }
  for (int n = 0; n < 200; ++n) {
    CHECK(std::abs(e1[n + 1] - (e1[n] - 0.25 * e2[n])) < 1e-13);
  }
  for (int n = 1; n <= 200; ++n) {
    CHECK(e1[n] <= (6.0 / 7.0) * std::pow(7.0 / 8.0, n) + 1e-15);
    CHECK(e2[n] >= 0.5 * e1[n] - 1e-15);
    CHECK(e1[n] < e1[n - 1]);
  }
}

TEST_CASE("escape probability: early values and stabilisation") {
  CHECK(toy_escape_probability(1) == doctest::Approx(0.5));
  CHECK(toy_escape_probability(2) == doctest::Approx(0.375));
  const double p59 = toy_escape_probability(59);
  const double p60 = toy_escape_probability(60);
  CHECK(std::abs(p60 - p59) < 1e-15);
  CHECK(p60 == doctest::Approx(0.2887880950866).epsilon(1e-10));
  for (int depth = 2; depth <= 20; ++depth) {
    CHECK(toy_escape_probability(depth) < toy_escape_probability(depth - 1));
  }
  CHECK_THROWS_AS(toy_escape_probability(0), std::invalid_argument);
}
