#include "tcpwin/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tcpwin/csv.hpp"
#include "tcpwin/process.hpp"

namespace tcpwin {

namespace {

// Below this relative gap the pair is numerically coalesced; the diagonal is
// absorbing analytically, so clamp to exact equality.
constexpr double kCoalescenceEps = 1e-15;

}  // namespace

CoupledState make_coupled_state(double x0, double y0) {
  if (!(x0 >= 0.0) || !(y0 >= 0.0)) {
    throw std::invalid_argument("make_coupled_state: positions must be nonnegative");
  }
  CoupledState state;
  state.upper_ = std::max(x0, y0);
  state.dist_ = std::abs(x0 - y0);
  state.upper_is_x_ = x0 >= y0;
  return state;
}

CoupledEvent coupled_jump_event(CoupledState& state, double a,
                                const MultiplicativeLaw& law, RngStream& stream) {
  if (!(a >= 0.0)) {
    throw std::invalid_argument("coupled_jump_event: a must be nonnegative");
  }
  const double e = stream.exponential();
  const double gap = jump_time(state.upper_, a, e);

  CoupledEvent event;
  event.time = state.time_ + gap;
  event.upper_pre = state.upper_ + gap;
  event.lower_pre = event.upper_pre - state.dist_;  // drift keeps the gap

  const double joint_prob = (event.lower_pre + a) / (event.upper_pre + a);
  const double coin = stream.uniform01();
  const double q = law.sample(stream);

  state.time_ = event.time;
  if (coin < joint_prob) {
    event.kind = CoupledEventKind::Joint;
    state.upper_ = q * event.upper_pre;
    state.dist_ = q * state.dist_;  // exact single-rounding contraction
  } else {
    event.kind = CoupledEventKind::UpperOnly;
    const double jumped = q * event.upper_pre;
    const double stayed = event.lower_pre;
    if (jumped >= stayed) {
      state.upper_ = jumped;
      state.dist_ = jumped - stayed;
    } else {
      state.upper_ = stayed;
      state.dist_ = stayed - jumped;
      state.upper_is_x_ = !state.upper_is_x_;
    }
  }
  const double scale = std::max(state.upper_, 1.0);
  if (state.dist_ < kCoalescenceEps * scale) state.dist_ = 0.0;
  event.upper_post = state.upper_;
  event.lower_post = state.lower();
  return event;
}

CoupledPath::CoupledPath(double x0, double y0, double horizon)
    : x0_(x0), y0_(y0), horizon_(horizon) {}

namespace {

std::size_t segment_index(const std::vector<CoupledEvent>& events, double t) {
  // Number of events with time <= t (right continuity at event times).
  std::size_t lo = 0;
  std::size_t hi = events.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (events[mid].time <= t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

double CoupledPath::x_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("CoupledPath::x_at: t outside [0, horizon]");
  }
  const std::size_t n = segment_index(events_, t);
  if (n == 0) return x0_ + t;
  return x_post_[n - 1] + (t - events_[n - 1].time);
}

double CoupledPath::y_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("CoupledPath::y_at: t outside [0, horizon]");
  }
  const std::size_t n = segment_index(events_, t);
  if (n == 0) return y0_ + t;
  return y_post_[n - 1] + (t - events_[n - 1].time);
}

double CoupledPath::distance_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range("CoupledPath::distance_at: t outside [0, horizon]");
  }
  const std::size_t n = segment_index(events_, t);
  if (n == 0) return std::abs(x0_ - y0_);
  return events_[n - 1].upper_post - events_[n - 1].lower_post;
}

void CoupledPath::write_csv(std::ostream& out) const {
  out << "event_index,time,upper_pre,lower_pre,upper_post,lower_post,event_kind\n";
  for (std::size_t n = 0; n < events_.size(); ++n) {
    const CoupledEvent& ev = events_[n];
    out << (n + 1) << ',' << format_double(ev.time) << ','
        << format_double(ev.upper_pre) << ',' << format_double(ev.lower_pre)
        << ',' << format_double(ev.upper_post) << ','
        << format_double(ev.lower_post) << ','
        << (ev.kind == CoupledEventKind::Joint ? 0 : 1) << '\n';
  }
}

CoupledPath simulate_coupled(double x0, double y0, double a,
                             const MultiplicativeLaw& law, double horizon,
                             RngStream& stream) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("simulate_coupled: horizon must be positive");
  }
  CoupledPath path(x0, y0, horizon);
  CoupledState state = make_coupled_state(x0, y0);
  for (;;) {
    CoupledState trial = state;
    const CoupledEvent event = coupled_jump_event(trial, a, law, stream);
    if (event.time > horizon) break;
    state = trial;
    path.events_.push_back(event);
    path.x_post_.push_back(state.x());
    path.y_post_.push_back(state.y());
  }
  return path;
}

void simulate_coupled_on_grid(double x0, double y0, double a,
                              const MultiplicativeLaw& law,
                              std::span<const double> times, RngStream& stream,
                              std::span<double> x_out, std::span<double> y_out) {
  if (times.empty()) return;
  if (x_out.size() != times.size() || y_out.size() != times.size()) {
    throw std::invalid_argument("simulate_coupled_on_grid: output size mismatch");
  }
  const double horizon = times.back();
  CoupledState state = make_coupled_state(x0, y0);
  std::size_t k = 0;
  while (k < times.size()) {
    CoupledState trial = state;
    const CoupledEvent event = coupled_jump_event(trial, a, law, stream);
    while (k < times.size() && times[k] < event.time) {
      const double drift = times[k] - state.time();
      x_out[k] = state.x() + drift;
      y_out[k] = state.y() + drift;
      ++k;
    }
    if (event.time > horizon) break;
    state = trial;
    while (k < times.size() && times[k] == state.time()) {
      x_out[k] = state.x();
      y_out[k] = state.y();
      ++k;
    }
  }
}

std::pair<double, double> coupled_embedded_step(double x, double y, double e,
                                                double q) {
  return {q * std::sqrt(x * x + 2.0 * e), q * std::sqrt(y * y + 2.0 * e)};
}

ConstantRateCoupledPath::ConstantRateCoupledPath(
    double initial_distance, double horizon, std::vector<double> jump_times,
    std::vector<double> factor_products)
    : initial_distance_(initial_distance),
      horizon_(horizon),
      jump_times_(std::move(jump_times)),
      factor_products_(std::move(factor_products)) {
  if (jump_times_.size() != factor_products_.size()) {
    throw std::invalid_argument("ConstantRateCoupledPath: size mismatch");
  }
}

double ConstantRateCoupledPath::distance_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::out_of_range(
        "ConstantRateCoupledPath::distance_at: t outside [0, horizon]");
  }
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return initial_distance_;
  return initial_distance_ * factor_products_[it - jump_times_.begin() - 1];
}

ConstantRateCoupledPath coupled_constant_rate(double x, double y, double lambda,
                                              const MultiplicativeLaw& law,
                                              double horizon, RngStream& stream) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("coupled_constant_rate: lambda must be > 0");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("coupled_constant_rate: horizon must be positive");
  }
  std::vector<double> times;
  std::vector<double> products;
  double t = 0.0;
  double product = 1.0;
  for (;;) {
    t += stream.exponential() / lambda;
    if (t > horizon) break;
    product *= law.sample(stream);
    times.push_back(t);
    products.push_back(product);
  }
  return ConstantRateCoupledPath(std::abs(x - y), horizon, std::move(times),
                                 std::move(products));
}

}  // namespace tcpwin
