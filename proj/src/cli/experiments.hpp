#pragma once

#include <cstdint>
#include <vector>

#include "tbq/measurement.hpp"
#include "tbq/tomography.hpp"
#include "tbq/wdm.hpp"

// Named experiments: each one drives the library the way one measurement in
// the lab is run, and returns the numbers the CLI writes out.
namespace tbq::experiments {

struct Populations {
  std::uint64_t early = 0;
  std::uint64_t late = 0;
  std::uint64_t n_trajectories = 0;

  double p_early() const { return static_cast<double>(early) / static_cast<double>(n_trajectories); }
  double p_late() const { return static_cast<double>(late) / static_cast<double>(n_trajectories); }
};

/// Photons per bin in a gated stream, by bin_index.
Populations count_populations(const EventStream& gated);

/// Sequence with the 1:4 intensity ratio whose brighter pulse has
/// sin^2(theta/2) = p_gen.
PulseSequence power_sequence(double p_gen);

struct QubitMeasurement {
  measure::FringeScan scan;
  tomo::FringeFit fit;
  Populations populations;
  double coherence = 0.0;        // fringe contrast corrected for bin imbalance
  double coherence_error = 0.0;
};

enum class ScanMode {
  FreshRunPerPoint,  // independent Monte-Carlo run at every interferometer phase
  SharedStream,      // one run, independent interferometer routing per phase
};

/// Populations from a separate gated run, then a fringe scan and fit.
QubitMeasurement measure_qubit(const PulseSequence& sequence, const PhysicalParams& params,
                               const std::vector<double>& phases, std::uint64_t trajectories,
                               std::uint64_t seed, ScanMode mode, Exec exec = Exec::Parallel);

struct PhaseSetpoint {
  double programmed = 0.0;      // rad, added to the late pulse
  QubitMeasurement measurement;
  double phase_difference = 0.0;  // fitted minus reference, wrapped
  double unwrapped = 0.0;
  tomo::ReconstructedState state;
};

struct PhaseQubitsResult {
  QubitMeasurement reference;
  std::vector<PhaseSetpoint> setpoints;
};

/// Reference sequence plus one modulated sequence per setpoint; fitted
/// phase differences are unwrapped in setpoint order.
PhaseQubitsResult phase_qubits(double theta_early, double theta_late, const std::vector<double>& setpoints,
                               const PhysicalParams& params, const std::vector<double>& phases,
                               std::uint64_t trajectories, std::uint64_t seed, ScanMode mode,
                               Exec exec = Exec::Parallel);

struct BackgroundCalibration {
  double background_rate = 0.0;
  double g2_zero = 0.0;
  int iterations = 0;
};

/// Bisection on background_rate until the Monte-Carlo g2(0) of the gated
/// stream reaches `target`. Each probe reuses the same seed.
BackgroundCalibration calibrate_background(const PulseSequence& sequence, const PhysicalParams& params,
                                           double target, std::uint64_t trajectories, std::uint64_t seed,
                                           int n_periods_window = 5, Exec exec = Exec::Parallel);

/// Gated g2 of one Monte-Carlo run.
measure::G2Table g2_of(const PulseSequence& sequence, const PhysicalParams& params, std::uint64_t trajectories,
                       std::uint64_t seed, int n_periods_window = 5, Exec exec = Exec::Parallel);

}  // namespace tbq::experiments
