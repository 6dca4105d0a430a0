#pragma once

#include <iosfwd>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "tbq/montecarlo.hpp"
#include "tbq/state.hpp"

// Two-colour wavelength-division multiplexing: a red-detuned pulse writes the
// early bin and a blue-detuned pulse writes the late bin, so the photon's
// energy tags its time bin and a spectral filter recovers either bin.
namespace tbq::wdm {

struct RandomPerTrajectory {
  bool operator==(const RandomPerTrajectory&) const = default;
};
struct Locked {
  double phase = 0.0;  // rad, blue relative to red
  bool operator==(const Locked&) const = default;
};
using PhaseMode = std::variant<RandomPerTrajectory, Locked>;

struct WdmSpec {
  double red_detuning = -9.55;  // ueV
  double blue_detuning = 9.55;  // ueV
  int red_bin = 0;
  int blue_bin = 1;
  double red_angle = std::numbers::pi / 2.0;  // rotation of the first pulse
  PhaseMode phase_mode = RandomPerTrajectory{};

  /// Throws ConfigError: "colors must differ" for equal detunings, and
  /// red < 0 < blue, distinct bins in {0, 1}.
  void check() const;
};

/// Red pulse of `red_angle` in red_bin, blue pulse in blue_bin sized so both
/// bins emit with equal probability (the second pulse compensates the
/// depletion of |h> by the first).
PulseSequence build_wdm_sequence(const WdmSpec& spec, const PhysicalParams& params);

struct WdmState {
  TimeBinState red;
  TimeBinState blue;
  bool relative_phase_known = false;
};

/// Per-colour photon states. Each colour occupies only its own bin, so each
/// has no intra-colour coherence; the cross-colour phase is known only in
/// Locked mode.
WdmState wdm_state(const WdmSpec& spec, const PhysicalParams& params);

struct FilterSettings {
  double fwhm = 5.0;          // ueV
  double extinction = 1e-3;
};

struct RecoveryRow {
  std::string filter;  // "none", "red", "blue"
  double early_frac = 0.0;
  double late_frac = 0.0;
  std::uint64_t transmitted = 0;  // events in bin 0 or 1 after filtering
  std::uint64_t total = 0;        // events in bin 0 or 1 before filtering
};

/// Early/late split of a gated WDM stream with no filter, a filter centred on
/// the red detuning, and one centred on the blue detuning. Throws
/// InsufficientStatistics if a filter transmits nothing.
std::vector<RecoveryRow> recovery_report(const EventStream& stream, const WdmSpec& spec,
                                         const FilterSettings& filter, Exec exec = Exec::Parallel);

/// CSV columns `filter,early_frac,late_frac,transmitted,total`.
void write_csv(std::ostream& out, const std::vector<RecoveryRow>& rows);

}  // namespace tbq::wdm
