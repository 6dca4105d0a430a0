#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tbq/montecarlo.hpp"
#include "tbq/pulse.hpp"
#include "tbq/state.hpp"

namespace tbq::measure {

struct Histogram {
  std::vector<double> bin_edges;  // ps, strictly increasing
  std::vector<std::uint64_t> counts;
  std::uint64_t seed = 0;
  std::uint64_t n_trajectories = 0;
  std::uint64_t n_input_events = 0;

  std::uint64_t total() const;
  /// Sum of bins whose centre lies in [begin, end).
  std::uint64_t sum_between(double begin, double end) const;
};

/// Counts in the three interferometer output peaks.
struct PeakCounts {
  std::uint64_t early = 0;   // early photon, short arm
  std::uint64_t middle = 0;  // early via long arm overlapping late via short arm
  std::uint64_t late = 0;    // late photon, long arm
  std::uint64_t side() const { return early + late; }
};

PeakCounts peak_counts(const Histogram& hist, const WindowLayout& layout);

struct FringeScan {
  std::vector<double> phases;  // rad
  std::vector<std::uint64_t> middle_counts;
  std::vector<std::uint64_t> side_counts;
};

/// Keeps events with timestamp in [window_start, window_end).
EventStream gate(const EventStream& stream, double window_start, double window_end);

/// Gate that keeps every emission bin and drops the reset at t = 0.
EventStream gate_default(const EventStream& stream);

struct MichelsonOptions {
  double resolution_ps = 0.0;  // 0: bin_separation / 30
  std::uint64_t salt = 0;      // selects an independent routing substream
  Exec exec = Exec::Parallel;
};

/// Unbalanced Michelson interferometer with a delay of one bin separation,
/// observed at one output port with a time-resolved detector.
///
/// Each photon reaches the port through the short arm (detected at t) or
/// the long arm (t + delay) with probability 1/4 each, except that the arm
/// that lands a coherent Raman photon in the overlap peak is weighted by
/// 1 + v cos(phase_rad + interferometer_phase). v is the contrast of one
/// coherent photon of the stream's sequence (the dephasing lives in the
/// photon phases). Incoherent, background and flash photons have v = 0.
/// Throws ConfigError if more than two emission bins are occupied.
Histogram michelson(const EventStream& stream, double interferometer_phase,
                    const MichelsonOptions& options = {});

/// Arrival-time histogram of a stream without interferometer, on the same
/// aligned grid as michelson, covering one repetition window.
Histogram time_histogram(const EventStream& stream, double resolution_ps);

/// Closed-form peak fractions (per repetition) for a photon state at one
/// interferometer phase: {early, middle, late}.
struct PeakExpectation {
  double early = 0.0;
  double middle = 0.0;
  double late = 0.0;
};
PeakExpectation michelson_expectation(const TimeBinState& state, double interferometer_phase);

/// Interferometer scan over an existing stream: michelson at each phase on
/// an independent routing substream. Needs at least 8 distinct phases.
FringeScan fringe_scan(const EventStream& stream, const std::vector<double>& phases,
                       Exec exec = Exec::Parallel);

/// Interferometer scan with a fresh gated Monte-Carlo run per phase point.
FringeScan fringe_scan(const PulseSequence& sequence, const PhysicalParams& params,
                       const std::vector<double>& phases, std::uint64_t trajectories_per_point,
                       std::uint64_t seed, Exec exec = Exec::Parallel);

/// `count` equally spaced phases over [0, 2 pi).
std::vector<double> phase_grid(int count);

/// Unit-peak Lorentzian transmission.
double lorentzian(double energy, double center, double fwhm);

/// Keeps each event with probability max(lorentzian(energy), extinction).
/// Throws ConfigError unless fwhm > 0 and 0 <= extinction < 1.
EventStream spectral_filter(const EventStream& stream, double center, double fwhm, double extinction,
                            std::uint64_t salt = 0, Exec exec = Exec::Parallel);

struct G2Table {
  std::vector<int> lag_periods;
  std::vector<double> g2;
  std::vector<double> sigma;
  std::vector<std::uint64_t> coincidences;

  double at(int lag) const;
  double sigma_at(int lag) const;
};

/// Hanbury Brown-Twiss correlation on a gated stream. Events are split
/// 50/50 onto two detectors; coincidences are binned by the nearest whole
/// number of periods between detection times, counted per available pair of
/// repetitions, and normalised by the mean over 1 <= |lag| <= n_periods_window.
/// Throws InsufficientStatistics when no side-peak coincidence exists.
G2Table hbt_g2(const EventStream& stream, double period_ps, int n_periods_window = 5,
               Exec exec = Exec::Parallel);

/// Repetition period used when none is given: the window length.
double default_period(const EventStream& stream);

void write_csv(std::ostream& out, const Histogram& hist);
void write_csv(std::ostream& out, const FringeScan& scan);
void write_csv(std::ostream& out, const G2Table& table);

}  // namespace tbq::measure
