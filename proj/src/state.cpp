#include "tbq/state.hpp"

#include <cmath>
#include <stdexcept>

namespace tbq {

TimeBinState::TimeBinState(double p_early, double p_late, std::complex<double> coherence)
    : p_early_(p_early), p_late_(p_late), coherence_(coherence) {
  if (!(p_early >= 0.0) || !(p_late >= 0.0))
    throw std::invalid_argument("TimeBinState: populations must be non-negative");
  if (p_early + p_late > 1.0 + 1e-12)
    throw std::invalid_argument("TimeBinState: populations exceed one");
}

bool purity_bound(const TimeBinState& s) {
  return std::abs(s.coherence()) <= std::sqrt(s.p_early() * s.p_late()) + 1e-12;
}

double BlochVector::norm() const { return std::sqrt(dot(*this)); }

BlochVector to_bloch(const TimeBinState& s) {
  const double n = s.p_photon();
  if (!(n > 0.0)) throw std::domain_error("to_bloch: state has no photon component");
  const auto c = s.coherence() / n;
  return {2.0 * c.real(), -2.0 * c.imag(), (s.p_early() - s.p_late()) / n};
}

}  // namespace tbq
