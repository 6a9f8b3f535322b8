#ifndef TCPWIN_TOY_CHAIN_HPP
#define TCPWIN_TOY_CHAIN_HPP

#include <cstddef>
#include <vector>

namespace tcpwin {

// Distribution on the dyadic state space {2^{-i} : i >= 0} of the toy chain
//   X_{n+1} = 1 with probability x/2, x/2 with probability 1 - x/2.
// The support is finite and tiny (n + 1 points after n steps from state 1),
// so the law is propagated exactly; no Monte Carlo involved. Internal
// accumulation in long double keeps the mass and moment identities well
// below the 1e-13 test tolerances over hundreds of steps.
class DyadicDistribution {
 public:
  static DyadicDistribution dirac_one();          // all mass at 2^0 = 1
  static DyadicDistribution at_exponent(int i);   // all mass at 2^{-i}

  std::size_t support_size() const { return probs_.size(); }
  double prob(std::size_t exponent) const;  // P(X = 2^{-exponent})
  double total_mass() const;
  double moment(int k) const;  // E(X^k)

  friend DyadicDistribution toy_step(const DyadicDistribution& d);

 private:
  DyadicDistribution() = default;
  std::vector<long double> probs_;  // probs_[i] = P(X = 2^{-i})
};

// Exact one-step pushforward: mass at x splits into x/2 toward state 1 and
// 1 - x/2 toward state x/2.
DyadicDistribution toy_step(const DyadicDistribution& d);

// E(X_n^k | X_0 = 1) by exact propagation; k in {1, 2}.
double toy_moments(int n, int k);

// prod_{i=1..depth} (1 - 2^{-i}): probability that the chain started at 1
// always halves; positive, which makes the chain transient toward 0.
double toy_escape_probability(int depth);

}  // namespace tcpwin

#endif  // TCPWIN_TOY_CHAIN_HPP
