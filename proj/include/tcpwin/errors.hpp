#ifndef TCPWIN_ERRORS_HPP
#define TCPWIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tcpwin {

// Thrown when an exponential-moment evaluation is requested outside its
// finiteness region (2*s*q^2 >= 1 for the invariant-law MGF).
class DivergentMgf : public std::runtime_error {
 public:
  explicit DivergentMgf(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the transient-moment formula when two decay rates theta_i,
// theta_j nearly coincide and the partial-fraction products blow up.
class DegenerateSpectrum : public std::runtime_error {
 public:
  explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by series evaluators that cannot certify the requested accuracy
// (e.g. the invariant-density series under heavy cancellation near x = 0).
class NonConvergent : public std::runtime_error {
 public:
  explicit NonConvergent(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tcpwin

#endif  // TCPWIN_ERRORS_HPP
