#include "tbq/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbq/errors.hpp"

namespace tbq {

std::string_view to_string(Laser laser) { return laser == Laser::Red ? "red" : "blue"; }

void PulseSequence::check() const {
  std::vector<std::string> errs;
  if (n_bins < 2) errs.push_back("n_bins must be at least 2");
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const auto& p = pulses[i];
    const std::string tag = "pulses[" + std::to_string(i) + "]";
    if (p.bin_index < 0 || p.bin_index >= n_bins) errs.push_back(tag + ".bin_index out of range");
    if (!(p.intensity >= 0.0)) errs.push_back(tag + ".intensity must be non-negative");
    if (i > 0 && pulses[i - 1].bin_index > p.bin_index)
      errs.push_back(tag + ": pulses must be ordered by bin_index");
    for (std::size_t j = 0; j < i; ++j)
      if (pulses[j].bin_index == p.bin_index && pulses[j].laser == p.laser)
        errs.push_back(tag + ": duplicate (bin_index, laser) pair");
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

bool PulseSequence::single_laser() const {
  return std::all_of(pulses.begin(), pulses.end(),
                     [&](const ResonantPulse& p) { return p.laser == pulses.front().laser; });
}

const ResonantPulse* PulseSequence::pulse_in_bin(int bin) const {
  for (const auto& p : pulses)
    if (p.bin_index == bin) return &p;
  return nullptr;
}

double intensity_for_angle(double theta) {
  const double r = theta / kReferenceAngle;
  return kReferenceIntensity * r * r;
}

PulseSequence two_pulse_sequence(double theta_early, double theta_late, double phase_early,
                                 double phase_late, Laser laser, double detuning) {
  PulseSequence seq;
  seq.n_bins = 2;
  seq.pulses = {
      {0, intensity_for_angle(theta_early), phase_early, laser, detuning},
      {1, intensity_for_angle(theta_late), phase_late, laser, detuning},
  };
  return seq;
}

WindowLayout::WindowLayout(const PhysicalParams& params, int n_bins)
    : n_bins_(n_bins),
      dt_(params.bin_separation_ps()),
      guard_(std::min(std::max(5.0 * params.detector_jitter, dt_ / 20.0), dt_ / 4.0)) {}

int WindowLayout::bin_of(double t) const {
  if (t < window_begin(0)) return -1;
  const int k = static_cast<int>(std::floor((t - window_begin(0)) / dt_));
  return k < n_bins_ ? k : -1;
}

}  // namespace tbq
