#pragma once

#include <iosfwd>
#include <vector>

#include "tbq/measurement.hpp"
#include "tbq/state.hpp"

namespace tbq::tomo {

enum class Weighting { Poisson, Uniform };

struct FringeFit {
  double visibility = 0.0;  // clamped to [0, 1]
  double phase = 0.0;       // rad, (-pi, pi]
  double offset = 0.0;      // counts
  double visibility_error = 0.0;
  double phase_error = 0.0;
  double offset_error = 0.0;
  double chi2 = 0.0;        // weighted residual sum of squares
  bool phase_defined = true;
  int iterations = 0;
};

/// Least-squares fit of counts = offset * (1 + visibility * cos(phi + phase)).
///
/// Solved as the linear model a + b cos(phi) + c sin(phi). With Poisson
/// weighting the weights are 1/model, iterated to a fixed point; errors come
/// from the weighted covariance. Constant counts give visibility 0 with
/// phase_defined = false. Throws ConfigError for fewer than 4 points and
/// FitError if the reweighting does not settle.
FringeFit fit_fringe(const measure::FringeScan& scan, Weighting weighting = Weighting::Poisson);
FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& counts,
                     Weighting weighting = Weighting::Poisson);

/// Bloch vector from bin populations and the degree of cross-bin coherence:
/// rho01 = visibility * sqrt(q0 q1) * exp(-i phase) over the renormalised
/// photon subspace. Phase 0 maps to +x. Throws std::domain_error when no
/// population is present.
BlochVector reconstruct(double p_early, double p_late, double visibility, double phase);

/// Degree of coherence from a fringe contrast. The middle-peak contrast of a
/// state with populations q0, q1 is 2 sqrt(q0 q1) times its coherence; for
/// balanced bins the two coincide. Clamped to [0, 1].
double coherence_from_fringe(double fringe_visibility, double p_early, double p_late);

/// (1 + measured . target) / 2 for a pure target. Throws
/// std::invalid_argument if |target| differs from 1 by more than 1e-9.
double fidelity(const BlochVector& measured, const BlochVector& target);

/// Uhlmann fidelity between two qubit states given by Bloch vectors.
double state_fidelity(const BlochVector& a, const BlochVector& b);

/// Unwraps successive phases so no step exceeds pi in magnitude.
std::vector<double> unwrap(const std::vector<double>& phases);

/// Wraps into (-pi, pi].
double wrap(double phase);

struct ReconstructedState {
  BlochVector bloch;
  double fidelity = 0.0;
  double visibility = 0.0;
  double phase = 0.0;
};

/// CSV columns `x,y,z,fidelity,visibility,phase_rad`.
void write_csv(std::ostream& out, const std::vector<ReconstructedState>& states);

}  // namespace tbq::tomo
