#include "tcpwin/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcpwin {

namespace {
constexpr double kWeightTolerance = 1e-12;
}

MultiplicativeLaw MultiplicativeLaw::dirac(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("MultiplicativeLaw::dirac: delta must lie in [0,1)");
  }
  MultiplicativeLaw law;
  law.kind_ = JumpLawKind::Dirac;
  law.delta_ = delta;
  return law;
}

MultiplicativeLaw MultiplicativeLaw::uniform01() {
  MultiplicativeLaw law;
  law.kind_ = JumpLawKind::Uniform01;
  return law;
}

MultiplicativeLaw MultiplicativeLaw::discrete_mixture(std::vector<JumpAtom> atoms) {
  if (atoms.empty()) {
    throw std::invalid_argument("MultiplicativeLaw::discrete_mixture: no atoms");
  }
  double total = 0.0;
  for (const JumpAtom& atom : atoms) {
    if (!(atom.value >= 0.0 && atom.value < 1.0)) {
      throw std::invalid_argument(
          "MultiplicativeLaw::discrete_mixture: atom value outside [0,1)");
    }
    if (!(atom.weight >= 0.0)) {
      throw std::invalid_argument(
          "MultiplicativeLaw::discrete_mixture: negative atom weight");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument(
        "MultiplicativeLaw::discrete_mixture: weights must sum to 1");
  }
  MultiplicativeLaw law;
  law.kind_ = JumpLawKind::DiscreteMixture;
  law.atoms_ = std::move(atoms);
  return law;
}

double MultiplicativeLaw::dirac_delta() const {
  if (kind_ != JumpLawKind::Dirac) {
    throw std::logic_error("MultiplicativeLaw::dirac_delta: not a Dirac law");
  }
  return delta_;
}

const std::vector<JumpAtom>& MultiplicativeLaw::atoms() const {
  if (kind_ != JumpLawKind::DiscreteMixture) {
    throw std::logic_error("MultiplicativeLaw::atoms: not a discrete mixture");
  }
  return atoms_;
}

double MultiplicativeLaw::moment(double p) const {
  if (!(p >= 0.0)) {
    throw std::invalid_argument("MultiplicativeLaw::moment: p must be >= 0");
  }
  if (p == 0.0) return 1.0;
  switch (kind_) {
    case JumpLawKind::Dirac:
      return std::pow(delta_, p);
    case JumpLawKind::Uniform01:
      return 1.0 / (p + 1.0);
    case JumpLawKind::DiscreteMixture: {
      double m = 0.0;
      for (const JumpAtom& atom : atoms_) m += atom.weight * std::pow(atom.value, p);
      return m;
    }
  }
  return 0.0;  // unreachable
}

double MultiplicativeLaw::essential_sup() const {
  switch (kind_) {
    case JumpLawKind::Dirac:
      return delta_;
    case JumpLawKind::Uniform01:
      return 1.0;
    case JumpLawKind::DiscreteMixture: {
      double q = 0.0;
      for (const JumpAtom& atom : atoms_) {
        if (atom.weight > 0.0) q = std::max(q, atom.value);
      }
      return q;
    }
  }
  return 0.0;  // unreachable
}

double MultiplicativeLaw::sample(RngStream& stream) const {
  switch (kind_) {
    case JumpLawKind::Dirac:
      return delta_;
    case JumpLawKind::Uniform01:
      return stream.uniform01();
    case JumpLawKind::DiscreteMixture: {
      const double u = stream.uniform01();
      double cumulative = 0.0;
      for (const JumpAtom& atom : atoms_) {
        cumulative += atom.weight;
        if (u < cumulative) return atom.value;
      }
      return atoms_.back().value;  // u landed on accumulated rounding slack
    }
  }
  return 0.0;  // unreachable
}

}  // namespace tcpwin
