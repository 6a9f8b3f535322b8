#include <stdexcept>

#include <doctest.h>

#include "tcpwin/empirical.hpp"
#include "tcpwin/jump_law.hpp"

using namespace tcpwin;

TEST_CASE("dirac law: constant samples, closed-form moments") {
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  RngStream stream(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(law.sample(stream) == 0.5);
  CHECK(law.moment(1.0) == doctest::Approx(0.5));
  CHECK(law.moment(2.0) == doctest::Approx(0.25));
  CHECK(law.moment(0.0) == 1.0);
  CHECK(law.essential_sup() == 0.5);
  CHECK(law.kappa1() == doctest::Approx(0.5));
}

TEST_CASE("uniform law: sample mean and moments") {
  const MultiplicativeLaw law = MultiplicativeLaw::uniform01();
  RngStream stream(7, 3);
  RunningStats stats;
  for (int i = 0; i < 1000000; ++i) stats.add(law.sample(stream));
  CHECK(stats.mean == doctest::Approx(0.5).epsilon(0.002));
  CHECK(law.moment(1.0) == doctest::Approx(0.5));
  CHECK(law.moment(2.0) == doctest::Approx(1.0 / 3.0));
  CHECK(law.essential_sup() == 1.0);
}

TEST_CASE("two-atom mixture: sample mean and essential sup") {
  const MultiplicativeLaw law = MultiplicativeLaw::discrete_mixture(
      {{0.25, 0.5}, {0.75, 0.5}});
  RngStream stream(11, 0);
  RunningStats stats;
  for (int i = 0; i < 1000000; ++i) stats.add(law.sample(stream));
  CHECK(stats.mean == doctest::Approx(0.5).epsilon(0.002));
  CHECK(law.moment(1.0) == doctest::Approx(0.5));
  CHECK(law.essential_sup() == 0.75);
  // atoms with zero weight do not extend the support
  const MultiplicativeLaw padded = MultiplicativeLaw::discrete_mixture(
      {{0.25, 1.0}, {0.9, 0.0}});
  CHECK(padded.essential_sup() == 0.25);
}

TEST_CASE("law validation rejects bad inputs") {
  CHECK_THROWS_AS(MultiplicativeLaw::dirac(1.0), std::invalid_argument);
  CHECK_THROWS_AS(MultiplicativeLaw::dirac(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(MultiplicativeLaw::discrete_mixture({{0.5, 0.7}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultiplicativeLaw::discrete_mixture({{1.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultiplicativeLaw::discrete_mixture({}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultiplicativeLaw::discrete_mixture({{0.5, -0.2}, {0.2, 1.2}}),
                  std::invalid_argument);
}
