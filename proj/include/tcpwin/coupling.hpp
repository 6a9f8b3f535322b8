#ifndef TCPWIN_COUPLING_HPP
#define TCPWIN_COUPLING_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "tcpwin/jump_law.hpp"
#include "tcpwin/rng.hpp"

namespace tcpwin {

enum class CoupledEventKind { Joint, UpperOnly };

struct CoupledEvent {
  double time = 0.0;
  double upper_pre = 0.0;
  double lower_pre = 0.0;
  double upper_post = 0.0;
  double lower_post = 0.0;
  CoupledEventKind kind = CoupledEventKind::Joint;
};

// Ordered pair of coupled components. `upper >= lower` always holds after
// normalisation; the physical identity of each marginal survives swaps via
// the flag, so the first/second marginal laws are unaffected by relabeling.
// The gap is carried as its own field with `lower` derived from it: a joint
// jump then contracts the distance by exactly the drawn factor, which the
// difference of two independently rounded products cannot guarantee once the
// pair is nearly coalesced.
class CoupledState {
 public:
  CoupledState() = default;

  double upper() const { return upper_; }
  double lower() const { return upper_ - dist_; }
  double distance() const { return dist_; }
  double time() const { return time_; }
  bool upper_is_x() const { return upper_is_x_; }

  double x() const { return upper_is_x_ ? upper() : lower(); }
  double y() const { return upper_is_x_ ? lower() : upper(); }

 private:
  friend CoupledState make_coupled_state(double x0, double y0);
  friend CoupledEvent coupled_jump_event(CoupledState& state, double a,
                                         const MultiplicativeLaw& law,
                                         RngStream& stream);
  double upper_ = 0.0;
  double dist_ = 0.0;
  double time_ = 0.0;
  bool upper_is_x_ = true;
};

CoupledState make_coupled_state(double x0, double y0);

// Advances the pair to its next jump. The clock is driven by the upper
// component at rate upper + s + a; at the jump, with probability
// (lower + T + a) / (upper + T + a) both components are multiplied by the
// same factor Q (Joint), otherwise only the upper one is (UpperOnly).
// The coin is a dedicated uniform drawn after the clock and before Q, so the
// factor law stays unconditioned. On the diagonal the joint probability is 1
// and the distance stays 0 forever.
CoupledEvent coupled_jump_event(CoupledState& state, double a,
                                const MultiplicativeLaw& law, RngStream& stream);

// Full coupled trajectory on [0, horizon]. The distance process is piecewise
// constant between events and changes only at jumps.
class CoupledPath {
 public:
  CoupledPath(double x0, double y0, double horizon);

  double horizon() const { return horizon_; }
  std::size_t event_count() const { return events_.size(); }
  const std::vector<CoupledEvent>& events() const { return events_; }

  double x_at(double t) const;
  double y_at(double t) const;
  double distance_at(double t) const;

  // Columns: event_index,time,upper_pre,lower_pre,upper_post,lower_post,
  // event_kind (0 = Joint, 1 = UpperOnly).
  void write_csv(std::ostream& out) const;

 private:
  friend CoupledPath simulate_coupled(double, double, double,
                                      const MultiplicativeLaw&, double,
                                      RngStream&);
  double x0_;
  double y0_;
  double horizon_;
  std::vector<CoupledEvent> events_;
  std::vector<double> x_post_;  // physical components just after each event
  std::vector<double> y_post_;
};

CoupledPath simulate_coupled(double x0, double y0, double a,
                             const MultiplicativeLaw& law, double horizon,
                             RngStream& stream);

// Physical components of one fresh coupled trajectory at each grid time
// (ascending). Cheaper than materialising a CoupledPath.
void simulate_coupled_on_grid(double x0, double y0, double a,
                              const MultiplicativeLaw& law,
                              std::span<const double> times, RngStream& stream,
                              std::span<double> x_out, std::span<double> y_out);

// Shared-noise step of two embedded chains: both use the same (E, Q), so
// |x' - y'| <= Q |x - y| pathwise.
std::pair<double, double> coupled_embedded_step(double x, double y, double e,
                                                double q);

// Constant-rate coupling: both components jump on one Poisson(lambda) clock
// with one shared factor sequence, so the distance is |x - y| times the
// running product of factors.
class ConstantRateCoupledPath {
 public:
  ConstantRateCoupledPath(double initial_distance, double horizon,
                          std::vector<double> jump_times,
                          std::vector<double> factor_products);

  double distance_at(double t) const;
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& factor_products() const { return factor_products_; }

 private:
  double initial_distance_;
  double horizon_;
  std::vector<double> jump_times_;
  std::vector<double> factor_products_;  // prod_{k<=j} Q_k
};

ConstantRateCoupledPath coupled_constant_rate(double x, double y, double lambda,
                                              const MultiplicativeLaw& law,
                                              double horizon, RngStream& stream);

}  // namespace tcpwin

#endif  // TCPWIN_COUPLING_HPP
