#pragma once

#include <complex>

namespace tbq {

/// Sub-normalised photonic time-bin density operator. The vacuum weight is
/// implicit: 1 - p_early - p_late.
class TimeBinState {
 public:
  TimeBinState() = default;
  /// Throws std::invalid_argument on negative populations or a total above one.
  TimeBinState(double p_early, double p_late, std::complex<double> coherence);

  double p_early() const { return p_early_; }
  double p_late() const { return p_late_; }
  std::complex<double> coherence() const { return coherence_; }
  double p_photon() const { return p_early_ + p_late_; }
  double vacuum() const { return 1.0 - p_photon(); }

  bool operator==(const TimeBinState&) const = default;

 private:
  double p_early_ = 0.0;
  double p_late_ = 0.0;
  std::complex<double> coherence_{};
};

/// Cauchy-Schwarz bound |rho01| <= sqrt(p0 p1), tolerance 1e-12.
bool purity_bound(const TimeBinState& state);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
  bool operator==(const BlochVector&) const = default;
};

/// Tolerance on |r| <= 1 for vectors built from fitted data.
inline constexpr double kBlochNormTolerance = 1e-9;

/// Bloch vector of the state renormalised over the one-photon subspace.
/// Phase 0 coherence maps to +x. Throws std::domain_error with no photon.
BlochVector to_bloch(const TimeBinState& state);

}  // namespace tbq
