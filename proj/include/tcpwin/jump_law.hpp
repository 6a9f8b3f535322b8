#ifndef TCPWIN_JUMP_LAW_HPP
#define TCPWIN_JUMP_LAW_HPP

#include <vector>

#include "tcpwin/rng.hpp"

namespace tcpwin {

enum class JumpLawKind { Dirac, Uniform01, DiscreteMixture };

struct JumpAtom {
  double value = 0.0;   // in [0,1)
  double weight = 0.0;  // nonnegative, weights sum to 1
};

// Law H of the multiplicative reduction factor Q, supported in [0,1).
// Three variants cover everything the experiments need: a Dirac mass
// (the classical halving protocol), the uniform law on (0,1), and a finite
// mixture of atoms. All p-th moments are closed form.
class MultiplicativeLaw {
 public:
  static MultiplicativeLaw dirac(double delta);
  static MultiplicativeLaw uniform01();
  static MultiplicativeLaw discrete_mixture(std::vector<JumpAtom> atoms);

  JumpLawKind kind() const { return kind_; }
  bool is_dirac() const { return kind_ == JumpLawKind::Dirac; }
  double dirac_delta() const;
  const std::vector<JumpAtom>& atoms() const;

  // E(Q^p) for real p >= 0.
  double moment(double p) const;

  // q = inf{x : P(Q <= x) = 1}, the essential supremum of Q.
  double essential_sup() const;

  // kappa_1 = 1 - E(Q), the mean contraction per jump; lies in (0,1].
  double kappa1() const { return 1.0 - moment(1.0); }

  double sample(RngStream& stream) const;

 private:
  MultiplicativeLaw() = default;

  JumpLawKind kind_ = JumpLawKind::Dirac;
  double delta_ = 0.0;
  std::vector<JumpAtom> atoms_;
};

inline double next_factor(RngStream& stream, const MultiplicativeLaw& law) {
  return law.sample(stream);
}

}  // namespace tcpwin

#endif  // TCPWIN_JUMP_LAW_HPP
