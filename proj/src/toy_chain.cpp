#include "tcpwin/toy_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace tcpwin {

DyadicDistribution DyadicDistribution::dirac_one() { return at_exponent(0); }

DyadicDistribution DyadicDistribution::at_exponent(int i) {
  if (i < 0) {
    throw std::invalid_argument("DyadicDistribution: exponent must be >= 0");
  }
  DyadicDistribution d;
  d.probs_.assign(static_cast<std::size_t>(i) + 1, 0.0L);
  d.probs_.back() = 1.0L;
  return d;
}

double DyadicDistribution::prob(std::size_t exponent) const {
  if (exponent >= probs_.size()) return 0.0;
  return static_cast<double>(probs_[exponent]);
}

double DyadicDistribution::total_mass() const {
  long double acc = 0.0L;
  for (long double p : probs_) acc += p;
  return static_cast<double>(acc);
}

double DyadicDistribution::moment(int k) const {
  if (k < 0) throw std::invalid_argument("DyadicDistribution::moment: k >= 0");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    // (2^{-i})^k is exact in binary.
    acc += probs_[i] * std::pow(2.0L, -static_cast<long double>(i) * k);
  }
  return static_cast<double>(acc);
}

DyadicDistribution toy_step(const DyadicDistribution& d) {
  DyadicDistribution out;
  out.probs_.assign(d.probs_.size() + 1, 0.0L);
  for (std::size_t i = 0; i < d.probs_.size(); ++i) {
    const long double p = d.probs_[i];
    if (p == 0.0L) continue;
    const long double x = std::pow(2.0L, -static_cast<long double>(i));
    out.probs_[0] += p * (x / 2.0L);
    out.probs_[i + 1] += p * (1.0L - x / 2.0L);
  }
  return out;
}

double toy_moments(int n, int k) {
  if (n < 0) throw std::invalid_argument("toy_moments: n must be >= 0");
  if (k != 1 && k != 2) {
    throw std::invalid_argument("toy_moments: k must be 1 or 2");
  }
  DyadicDistribution d = DyadicDistribution::dirac_one();
  for (int step = 0; step < n; ++step) d = toy_step(d);
  return d.moment(k);
}

double toy_escape_probability(int depth) {
  if (depth < 1) {
    throw std::invalid_argument("toy_escape_probability: depth must be >= 1");
  }
  double product = 1.0;
  double power = 1.0;
  for (int i = 1; i <= depth; ++i) {
    power *= 0.5;
    product *= 1.0 - power;
  }
  return product;
}

}  // namespace tcpwin
