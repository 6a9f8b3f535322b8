#ifndef TCPWIN_PROCESS_HPP
#define TCPWIN_PROCESS_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tcpwin/empirical.hpp"
#include "tcpwin/jump_law.hpp"
#include "tcpwin/rng.hpp"

namespace tcpwin {

// The three jump-rate regimes of the window-size process: rate x (the real
// TCP scaling limit), rate x + a with a > 0, and a constant Poisson rate.
enum class RateModel { Linear, Shifted, Constant };

struct ProcessSpec {
  RateModel rate_model;
  double a;       // Shifted only, > 0
  double lambda;  // Constant only, > 0
  MultiplicativeLaw jump_law;

  static ProcessSpec linear(MultiplicativeLaw law);
  static ProcessSpec shifted(double a, MultiplicativeLaw law);
  static ProcessSpec constant_rate(double lambda, MultiplicativeLaw law);

  double kappa1() const { return jump_law.kappa1(); }

  // Additive rate shift for the position-dependent models (0 for Linear).
  double rate_shift() const;
};

// First time T > 0 at which the integrated rate int_0^T (x + a + s) ds
// reaches e. Closed form sqrt((x+a)^2 + 2e) - (x+a), evaluated as
// 2e / (sqrt((x+a)^2 + 2e) + (x+a)) which is exact algebraically and avoids
// the cancellation of the naive difference when x >> sqrt(e).
double jump_time(double x, double a, double e);

// One trajectory: piecewise-linear slope-1 flow, multiplicative jumps.
// Stores every jump with T_n <= horizon; queries beyond the horizon are
// errors, not extrapolations.
class PathSample {
 public:
  PathSample(double initial, double horizon, std::vector<double> jump_times,
             std::vector<double> post_jump_positions);

  double initial() const { return initial_; }
  double horizon() const { return horizon_; }
  std::size_t jump_count() const { return jump_times_.size(); }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& post_jump_positions() const { return post_jump_; }

  // X_{T_n^-}, the position just before the n-th jump (n counts from 1).
  double pre_jump_position(std::size_t n) const;

  // Right-continuous position at t in [0, horizon]; at t == T_n this is the
  // post-jump value.
  double position_at(double t) const;

  // Columns: n,T_n,X_pre,X_post. Header row, 17-significant-digit floats.
  void write_csv(std::ostream& out) const;

 private:
  double initial_;
  double horizon_;
  std::vector<double> jump_times_;
  std::vector<double> post_jump_;
};

PathSample simulate_path(const ProcessSpec& spec, double x0, double horizon,
                         RngStream& stream);

// Positions of a single fresh trajectory at each time of the ascending grid
// `times`; out must have the same length. Cheaper than materialising a
// PathSample when only a few marginals are needed.
void simulate_on_grid(const ProcessSpec& spec, double x0,
                      std::span<const double> times, RngStream& stream,
                      std::span<double> out);

double simulate_position_at(const ProcessSpec& spec, double x0, double t,
                            RngStream& stream);

// n_replicas independent draws of X_t, replica i on stream
// (root_seed, stream_base + i). The initial law is any sampler callable.
std::vector<double> marginal_positions(
    const ProcessSpec& spec, const std::function<double(RngStream&)>& initial_law,
    double t, std::size_t n_replicas, std::uint64_t root_seed,
    std::uint64_t stream_base);

// Same draws as a sorted cloud, ready for W_p / KS work.
EmpiricalDistribution marginal_sample(
    const ProcessSpec& spec, const std::function<double(RngStream&)>& initial_law,
    double t, std::size_t n_replicas, std::uint64_t root_seed,
    std::uint64_t stream_base);

inline std::function<double(RngStream&)> dirac_initial(double x) {
  return [x](RngStream&) { return x; };
}

}  // namespace tcpwin

#endif  // TCPWIN_PROCESS_HPP
