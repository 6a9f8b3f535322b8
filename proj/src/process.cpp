#include "tcpwin/process.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tcpwin/csv.hpp"

namespace tcpwin {

ProcessSpec ProcessSpec::linear(MultiplicativeLaw law) {
  return ProcessSpec{RateModel::Linear, 0.0, 0.0, std::move(law)};
}

ProcessSpec ProcessSpec::shifted(double a, MultiplicativeLaw law) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("ProcessSpec::shifted: a must be > 0");
  }
  return ProcessSpec{RateModel::Shifted, a, 0.0, std::move(law)};
}

ProcessSpec ProcessSpec::constant_rate(double lambda, MultiplicativeLaw law) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ProcessSpec::constant_rate: lambda must be > 0");
  }
  return ProcessSpec{RateModel::Constant, 0.0, lambda, std::move(law)};
}

double ProcessSpec::rate_shift() const {
  switch (rate_model) {
    case RateModel::Linear:
      return 0.0;
    case RateModel::Shifted:
      return a;
    case RateModel::Constant:
      throw std::logic_error("ProcessSpec::rate_shift: constant-rate model");
  }
  return 0.0;  // unreachable
}

double jump_time(double x, double a, double e) {
  if (!(x >= 0.0) || !(a >= 0.0) || !(e >= 0.0)) {
    throw std::invalid_argument("jump_time: arguments must be nonnegative reals");
  }
  const double s = x + a;
  return 2.0 * e / (std::sqrt(s * s + 2.0 * e) + s);
}

PathSample::PathSample(double initial, double horizon,
                       std::vector<double> jump_times,
                       std::vector<double> post_jump_positions)
    : initial_(initial),
      horizon_(horizon),
      jump_times_(std::move(jump_times)),
      post_jump_(std::move(post_jump_positions)) {
  if (jump_times_.size() != post_jump_.size()) {
    throw std::invalid_argument("PathSample: jump/position count mismatch");
  }
}

double PathSample::pre_jump_position(std::size_t n) const {
  if (n == 0 || n > jump_times_.size()) {
    throw std::out_of_range("PathSample::pre_jump_position: bad jump index");
  }
  if (n == 1) return initial_ + jump_times_[0];
  return post_jump_[n - 2] + (jump_times_[n - 1] - jump_times_[n - 2]);
}

double PathSample::position_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("PathSample::position_at: t outside [0, horizon]");
  }
  // First jump time strictly greater than t; the segment index is one less.
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return initial_ + t;
  const std::size_t n = static_cast<std::size_t>(it - jump_times_.begin()) - 1;
  return post_jump_[n] + (t - jump_times_[n]);
}

void PathSample::write_csv(std::ostream& out) const {
  out << "n,T_n,X_pre,X_post\n";
  for (std::size_t n = 0; n < jump_times_.size(); ++n) {
    out << (n + 1) << ',' << format_double(jump_times_[n]) << ','
        << format_double(pre_jump_position(n + 1)) << ','
        << format_double(post_jump_[n]) << '\n';
  }
}

namespace {

void check_sim_inputs(double x0, double horizon) {
  if (!(x0 >= 0.0)) {
    throw std::invalid_argument("simulate: x0 must be nonnegative");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("simulate: horizon must be positive");
  }
}

double next_gap(const ProcessSpec& spec, double x, RngStream& stream) {
  const double e = stream.exponential();
  if (spec.rate_model == RateModel::Constant) return e / spec.lambda;
  return jump_time(x, spec.rate_shift(), e);
}

}  // namespace

PathSample simulate_path(const ProcessSpec& spec, double x0, double horizon,
                         RngStream& stream) {
  check_sim_inputs(x0, horizon);
  std::vector<double> times;
  std::vector<double> positions;
  double t = 0.0;
  double x = x0;
  for (;;) {
    const double gap = next_gap(spec, x, stream);
    if (t + gap > horizon) break;
    t += gap;
    const double pre = x + gap;
    x = spec.jump_law.sample(stream) * pre;
    times.push_back(t);
    positions.push_back(x);
  }
  return PathSample(x0, horizon, std::move(times), std::move(positions));
}

void simulate_on_grid(const ProcessSpec& spec, double x0,
                      std::span<const double> times, RngStream& stream,
                      std::span<double> out) {
  if (times.empty()) return;
  if (!(x0 >= 0.0)) {
    throw std::invalid_argument("simulate_on_grid: x0 must be nonnegative");
  }
  if (!(times.front() >= 0.0)) {
    throw std::invalid_argument("simulate_on_grid: times must be nonnegative");
  }
  if (out.size() != times.size()) {
    throw std::invalid_argument("simulate_on_grid: output size mismatch");
  }
  const double horizon = times.back();
  std::size_t k = 0;
  double t = 0.0;
  double x = x0;
  while (k < times.size()) {
    const double gap = next_gap(spec, x, stream);
    const double t_next = t + gap;
    // Grid points strictly before the jump see the pre-jump flow; a grid
    // point equal to the jump time takes the post-jump value
    // (right continuity).
    while (k < times.size() && times[k] < t_next) {
      out[k] = x + (times[k] - t);
      ++k;
    }
    if (t_next > horizon) break;
    t = t_next;
    x = spec.jump_law.sample(stream) * (x + gap);
    while (k < times.size() && times[k] == t) {
      out[k] = x;
      ++k;
    }
  }
}

double simulate_position_at(const ProcessSpec& spec, double x0, double t,
                            RngStream& stream) {
  if (t == 0.0) return x0;
  double out = 0.0;
  simulate_on_grid(spec, x0, std::span<const double>(&t, 1), stream,
                   std::span<double>(&out, 1));
  return out;
}

std::vector<double> marginal_positions(
    const ProcessSpec& spec, const std::function<double(RngStream&)>& initial_law,
    double t, std::size_t n_replicas, std::uint64_t root_seed,
    std::uint64_t stream_base) {
  if (n_replicas == 0) {
    throw std::invalid_argument("marginal_positions: need at least one replica");
  }
  std::vector<double> out(n_replicas);
  for (std::size_t i = 0; i < n_replicas; ++i) {
    RngStream stream(root_seed, stream_base + i);
    const double x0 = initial_law(stream);
    out[i] = simulate_position_at(spec, x0, t, stream);
  }
  return out;
}

EmpiricalDistribution marginal_sample(
    const ProcessSpec& spec, const std::function<double(RngStream&)>& initial_law,
    double t, std::size_t n_replicas, std::uint64_t root_seed,
    std::uint64_t stream_base) {
  return EmpiricalDistribution(
      marginal_positions(spec, initial_law, t, n_replicas, root_seed, stream_base));
}

}  // namespace tcpwin
