#pragma once

#include <numbers>
#include <string_view>
#include <vector>

#include "tbq/params.hpp"

namespace tbq {

enum class Laser { Red, Blue };

std::string_view to_string(Laser laser);

/// Intensity calibration shared by every sequence: a pulse of intensity
/// kReferenceIntensity rotates the spin by kReferenceAngle.
inline constexpr double kReferenceIntensity = 1.0;
inline constexpr double kReferenceAngle = std::numbers::pi / 2.0;

struct ResonantPulse {
  int bin_index = 0;
  double intensity = 0.0;  // relative optical power
  double phase = 0.0;      // rad, programmed modulator offset
  Laser laser = Laser::Red;
  double detuning = 0.0;   // ueV from the diagonal transition

  bool operator==(const ResonantPulse&) const = default;
};

struct PulseSequence {
  int n_bins = 2;
  std::vector<ResonantPulse> pulses;  // ordered by bin_index
  bool reset_before = true;
  // When false and the sequence uses both lasers, the optical phase between
  // them is redrawn uniformly for every repetition.
  bool lasers_phase_locked = true;

  bool operator==(const PulseSequence&) const = default;

  /// Throws ConfigError on bin_index out of range, negative intensity,
  /// n_bins < 2, unsorted pulses or a repeated (bin, laser) pair.
  void check() const;

  bool single_laser() const;
  const ResonantPulse* pulse_in_bin(int bin) const;
};

/// Intensity that produces rotation `theta` under the shared calibration.
double intensity_for_angle(double theta);

/// Two-bin, single-laser sequence with the given rotation angles and pulse
/// phases; the usual reference / modulated sequence.
PulseSequence two_pulse_sequence(double theta_early, double theta_late,
                                 double phase_early = 0.0, double phase_late = 0.0,
                                 Laser laser = Laser::Red, double detuning = 0.0);

/// Timing of one repetition of a sequence. Times in ps from the reset.
///
///   0            reset (flash photons)
///   (k+1)*dt     resonant pulse / start of bin k
///   length()     end of the window and repetition period
///
/// Photon-counting windows open `guard()` before each bin start so that
/// jitter does not push prompt photons into the previous window.
class WindowLayout {
 public:
  WindowLayout(const PhysicalParams& params, int n_bins);

  int n_bins() const { return n_bins_; }
  double bin_separation() const { return dt_; }
  double bin_start(int k) const { return (k + 1) * dt_; }
  double guard() const { return guard_; }
  double length() const { return (2 * n_bins_ + 4) * dt_; }

  /// Counting window for emission bin k, or for interferometer peak k when
  /// k == n_bins (the late-via-long-arm peak).
  double window_begin(int k) const { return bin_start(k) - guard_; }
  double window_end(int k) const { return bin_start(k + 1) - guard_; }

  /// Gate keeping every emission bin and excluding the reset at t = 0.
  double gate_begin() const { return window_begin(0); }
  double gate_end() const { return window_end(n_bins_ - 1); }

  /// Index of the counting window containing `t`, or -1.
  int bin_of(double t) const;

 private:
  int n_bins_;
  double dt_;
  double guard_;
};

}  // namespace tbq
