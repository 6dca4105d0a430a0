#pragma once

#include <iosfwd>
#include <vector>

#include "tbq/params.hpp"
#include "tbq/pulse.hpp"
#include "tbq/state.hpp"

// Closed-form pulse-area model of Raman photon generation.
//
// A square pulse of area theta drives |h> -> |T> and produces a photon with
// probability sin^2(theta/2). A fraction 2G^2 / (2G^2 + W^2) of that light is
// coherent Raman scattering (G = 1/T1, W = theta / pulse_duration); the rest
// is incoherent decay carrying no phase relation to the drive. Spin
// dephasing between bins multiplies the cross-bin coherence by
// exp(-bin_separation / T2).
namespace tbq::dynamics {

struct DriveDerived {
  double theta = 0.0;  // rad
  double rabi = 0.0;   // rad/ps
  double gamma = 0.0;  // 1/ps
};

/// theta = reference_angle * sqrt(intensity / reference_intensity).
/// Throws std::invalid_argument for reference_intensity <= 0 or negative intensity.
double rotation_angle(double intensity, double reference_intensity, double reference_angle);

/// Rotation angle of `pulse` under the shared intensity calibration.
double rotation_angle(const ResonantPulse& pulse);

/// sin^2(theta / 2), clamped to [0, 1].
double excitation_probability(double theta);

/// Coherent share of the scattered light, 2 gamma^2 / (2 gamma^2 + rabi^2).
double coherent_fraction(double gamma, double rabi);

DriveDerived derive(double theta, const PhysicalParams& params);

/// Multiplicative loss of cross-bin coherence from spin dephasing.
double dephasing_factor(const PhysicalParams& params);

/// Photon state produced by a two-bin, single-laser sequence. Cross-bin
/// coherence uses the geometric mean of the two pulses' coherent fractions.
/// Throws ConfigError for mixed lasers (use tbq::wdm) or a bin without pulse.
TimeBinState generate_state(const PulseSequence& sequence, const PhysicalParams& params);

/// Probability, per repetition, that the photon comes out coherently in
/// each bin, for any two-bin sequence (mixed lasers allowed).
struct CoherentWeights {
  double early = 0.0;
  double late = 0.0;
  double incoherent_early = 0.0;
  double incoherent_late = 0.0;
};
CoherentWeights coherent_weights(const PulseSequence& sequence, const PhysicalParams& params);

/// Fringe contrast carried by one coherently scattered photon of this
/// sequence before dephasing: 2 sqrt(w0 w1) / (w0 + w1). Zero when only one
/// bin has a coherent amplitude.
double coherent_photon_visibility(const PulseSequence& sequence, const PhysicalParams& params);

/// Expected visibility as a function of generation probability, using the
/// Rabi frequency of the brighter (second) pulse: p_gen = sin^2(theta2/2).
/// Throws std::domain_error unless 0 < p_gen <= 1.
double expected_visibility(double p_gen, const PhysicalParams& params);

struct VisibilityCurve {
  std::vector<double> p_gen;
  std::vector<double> t1_ps;
  std::vector<std::vector<double>> visibility;  // [t1 index][p index]
};

/// expected_visibility on p_gen_grid x t1_list, with T1 overridden per row.
VisibilityCurve visibility_curve(const std::vector<double>& p_gen_grid,
                                 const std::vector<double>& t1_list,
                                 const PhysicalParams& params);

/// CSV columns `p_gen,t1_ps,visibility`, rows grouped by T1.
void write_csv(std::ostream& out, const VisibilityCurve& curve);

}  // namespace tbq::dynamics
