#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "tcpwin/bounds.hpp"
#include "tcpwin/coupling.hpp"
#include "tcpwin/empirical.hpp"
#include "tcpwin/process.hpp"

using namespace tcpwin;

TEST_CASE("the diagonal is absorbing") {
  const MultiplicativeLaw law = MultiplicativeLaw::uniform01();
  CoupledState state = make_coupled_state(1.5, 1.5);
  RngStream stream(1, 0);
  for (int i = 0; i < 200; ++i) {
    const CoupledEvent event = coupled_jump_event(state, 0.5, law, stream);
    CHECK(event.kind == CoupledEventKind::Joint);
    CHECK(state.distance() == 0.0);
  }
}

TEST_CASE("post-event values and joint frequency match the two-branch rule") {
  // From (2,1) with a = 0 and Dirac(1/2) factors, conditioned on the jump at
  // drift t: either both halve or only the upper does, with joint
  // probability (1+t)/(2+t).
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  const std::size_t n = 100000;
  RunningStats joint_indicator;
  RunningStats joint_prob;
  for (std::size_t i = 0; i < n; ++i) {
    CoupledState state = make_coupled_state(2.0, 1.0);
    RngStream stream(23, i);
    const CoupledEvent event = coupled_jump_event(state, 0.0, law, stream);
    const double t = event.time;
    if (event.kind == CoupledEventKind::Joint) {
      CHECK(state.x() == doctest::Approx(0.5 * (2.0 + t)).epsilon(1e-12));
      CHECK(state.y() == doctest::Approx(0.5 * (1.0 + t)).epsilon(1e-12));
      joint_indicator.add(1.0);
    } else {
      CHECK(state.x() == doctest::Approx(0.5 * (2.0 + t)).epsilon(1e-12));
      CHECK(state.y() == doctest::Approx(1.0 + t).epsilon(1e-12));
      joint_indicator.add(0.0);
    }
    joint_prob.add((1.0 + t) / (2.0 + t));
  }
  const double se =
      std::sqrt(joint_indicator.stderr_of_mean() * joint_indicator.stderr_of_mean() +
                joint_prob.stderr_of_mean() * joint_prob.stderr_of_mean());
  CHECK(std::abs(joint_indicator.mean - joint_prob.mean) < 3.0 * se);
}

TEST_CASE("joint jumps multiply the distance by the factor exactly") {
  const MultiplicativeLaw law = MultiplicativeLaw::discrete_mixture(
      {{0.25, 0.5}, {0.75, 0.5}});
  CoupledState state = make_coupled_state(3.0, 1.0);
  RngStream stream(29, 0);
  for (int i = 0; i < 500; ++i) {
    const double before = state.distance();
    const CoupledEvent event = coupled_jump_event(state, 1.0, law, stream);
    if (event.kind == CoupledEventKind::Joint && before > 0.0) {
      if (state.distance() == 0.0) {
        // the coalescence clamp fired; only legitimate for sub-1e-12 gaps
        CHECK(before < 1e-12 * std::max(state.upper(), 1.0));
        continue;
      }
      const double ratio = state.distance() / before;
      const bool matches_atom = std::abs(ratio - 0.25) < 1e-12 ||
                                std::abs(ratio - 0.75) < 1e-12;
      CHECK(matches_atom);
    }
  }
}

TEST_CASE("with Dirac(h) and a = 0 the pair never exits D_h after a joint jump") {
  const double h = 0.5;
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(h);
  for (std::size_t rep = 0; rep < 200; ++rep) {
    CoupledState state = make_coupled_state(2.0, 1.0);
    RngStream stream(31, rep);
    bool joined = false;
    for (int i = 0; i < 100; ++i) {
      const CoupledEvent event = coupled_jump_event(state, 0.0, law, stream);
      if (event.kind == CoupledEventKind::Joint) joined = true;
      if (joined) {
        CHECK(state.upper() <= state.lower() / h + 1e-12);
        CHECK(state.upper() >= h * state.lower() - 1e-12);
      }
    }
  }
}

TEST_CASE("one-step drift of the mean distance is at most -a kappa1 distance") {
  const double a = 1.0;
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  const double dt = 0.02;
  const std::size_t n = 400000;
  RunningStats slope;
  const std::vector<double> grid = {dt};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream(37, i);
    double x = 0.0;
    double y = 0.0;
    simulate_coupled_on_grid(2.0, 1.0, a, law, grid, stream,
                             std::span<double>(&x, 1), std::span<double>(&y, 1));
    slope.add((std::abs(x - y) - 1.0) / dt);
  }
  const double kappa1 = law.kappa1();
  CHECK(slope.mean <= -a * kappa1 * 1.0 + 3.0 * slope.stderr_of_mean());
}

TEST_CASE("shared-noise embedded pairs contract pathwise and in mean") {
  RngStream stream(41, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = 4.0 * stream.uniform01();
    const double y = 4.0 * stream.uniform01();
    const double e = stream.exponential();
    const double q = stream.uniform01();
    const auto [xn, yn] = coupled_embedded_step(x, y, e, q);
    CHECK(std::abs(xn - yn) <= q * std::abs(x - y) + 1e-12);
  }
  // Ten Dirac(1/2) steps from (2,1): mean distance under 2^{-10}.
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  RunningStats stats;
  for (std::size_t i = 0; i < 20000; ++i) {
    RngStream s(43, i);
    double x = 2.0;
    double y = 1.0;
    for (int k = 0; k < 10; ++k) {
      const double e = s.exponential();
      const double q = law.sample(s);
      const auto [xn, yn] = coupled_embedded_step(x, y, e, q);
      x = xn;
      y = yn;
    }
    stats.add(std::abs(x - y));
  }
  CHECK(stats.mean <= std::pow(2.0, -10.0) + 3.0 * stats.stderr_of_mean());
}

TEST_CASE("constant-rate coupling: exact decay of the distance in mean") {
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  const double lambda = 1.0;
  const double t = 3.0;
  RunningStats d1;
  RunningStats d2;
  for (std::size_t i = 0; i < 100000; ++i) {
    RngStream stream(47, i);
    const ConstantRateCoupledPath path =
        coupled_constant_rate(2.0, 1.0, lambda, law, t, stream);
    const double d = path.distance_at(t);
    d1.add(d);
    d2.add(d * d);
  }
  const double exact1 = std::exp(-lambda * t * (1.0 - law.moment(1.0)));
  const double exact2 = std::exp(-lambda * t * (1.0 - law.moment(2.0)));
  CHECK(std::abs(d1.mean - exact1) < 3.0 * d1.stderr_of_mean());
  CHECK(std::abs(d2.mean - exact2) < 3.0 * d2.stderr_of_mean());

  RngStream stream(47, 12345);
  const ConstantRateCoupledPath same =
      coupled_constant_rate(1.5, 1.5, lambda, law, t, stream);
  CHECK(same.distance_at(0.5 * t) == 0.0);
}

TEST_CASE("coupled path queries are piecewise linear and consistent") {
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  RngStream stream(53, 0);
  const CoupledPath path = simulate_coupled(2.0, 1.0, 0.0, law, 10.0, stream);
  REQUIRE(path.event_count() > 0);
  CHECK(path.x_at(0.0) == 2.0);
  CHECK(path.y_at(0.0) == 1.0);
  CHECK(path.distance_at(0.0) == 1.0);
  const CoupledEvent& first = path.events().front();
  const double before = 0.5 * first.time;
  CHECK(path.x_at(before) == doctest::Approx(2.0 + before));
  CHECK(path.distance_at(before) == doctest::Approx(1.0));
  // distance is |x - y| and constant between events
  for (double t : {0.3, 1.7, 4.9, 9.5}) {
    CHECK(path.distance_at(t) ==
          doctest::Approx(std::abs(path.x_at(t) - path.y_at(t))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(path.x_at(10.5), std::out_of_range);

  RngStream stream2(53, 1);
  const CoupledPath tied = simulate_coupled(1.0, 1.0, 0.0, law, 5.0, stream2);
  for (double t : {0.0, 1.0, 2.5, 5.0}) CHECK(tied.distance_at(t) == 0.0);
}

TEST_CASE("coupled marginals match direct simulation (both components)") {
  const double a = 1.0;
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  const ProcessSpec spec = ProcessSpec::shifted(a, law);
  const std::size_t n = 10000;
  const double t = 1.0;
  std::vector<double> coupled_x(n);
  std::vector<double> coupled_y(n);
  std::vector<double> direct_x(n);
  std::vector<double> direct_y(n);
  const std::vector<double> grid = {t};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream cs(59, i);
    simulate_coupled_on_grid(2.0, 1.0, a, law, grid, cs,
                             std::span<double>(&coupled_x[i], 1),
                             std::span<double>(&coupled_y[i], 1));
    RngStream dx(61, i);
    direct_x[i] = simulate_position_at(spec, 2.0, t, dx);
    RngStream dy(67, i);
    direct_y[i] = simulate_position_at(spec, 1.0, t, dy);
  }
  const double dx_stat = ks_statistic(EmpiricalDistribution(coupled_x),
                                      EmpiricalDistribution(direct_x));
  const double dy_stat = ks_statistic(EmpiricalDistribution(coupled_y),
                                      EmpiricalDistribution(direct_y));
  CHECK(ks_two_sample_pvalue(dx_stat, n, n) > 0.01);
  CHECK(ks_two_sample_pvalue(dy_stat, n, n) > 0.01);
}

TEST_CASE("coupled CSV dump has the documented shape") {
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  RngStream stream(71, 0);
  const CoupledPath path = simulate_coupled(2.0, 1.0, 0.0, law, 4.0, stream);
  std::ostringstream out;
  path.write_csv(out);
  const std::string text = out.str();
  CHECK(text.rfind("event_index,time,upper_pre,lower_pre,upper_post,lower_post,"
                   "event_kind\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(path.event_count()) + 1);
}

TEST_CASE("continuous decay bound holds along the coupled dynamics") {
  const double a = 1.0;
  const MultiplicativeLaw law = MultiplicativeLaw::dirac(0.5);
  const std::vector<double> grid = {1.0, 2.0};
  RunningStats at1;
  RunningStats at2;
  for (std::size_t i = 0; i < 50000; ++i) {
    RngStream stream(73, i);
    double xs[2];
    double ys[2];
    simulate_coupled_on_grid(2.0, 1.0, a, law, grid, stream, xs, ys);
    at1.add(std::abs(xs[0] - ys[0]));
    at2.add(std::abs(xs[1] - ys[1]));
  }
  CHECK(at1.mean <= continuous_decay_bound(a, law.kappa1(), 1.0, 1.0) +
                        3.0 * at1.stderr_of_mean());
  CHECK(at2.mean <= continuous_decay_bound(a, law.kappa1(), 2.0, 1.0) +
                        3.0 * at2.stderr_of_mean());
}
