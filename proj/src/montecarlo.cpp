#include "tbq/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tbq/detail/parallel.hpp"
#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"

namespace tbq {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::CoherentRaman: return "CoherentRaman";
    case Origin::IncoherentDecay: return "IncoherentDecay";
    case Origin::Background: return "Background";
    case Origin::ResetFlash: return "ResetFlash";
  }
  return "?";
}

Origin origin_from_string(std::string_view name) {
  for (Origin o : {Origin::CoherentRaman, Origin::IncoherentDecay, Origin::Background, Origin::ResetFlash})
    if (to_string(o) == name) return o;
  throw std::invalid_argument("unknown photon origin '" + std::string(name) + "'");
}

std::uint64_t event_key(const PhotonEvent& e) {
  return mix64(e.trajectory_id) ^ std::bit_cast<std::uint64_t>(e.timestamp_ps);
}

namespace mc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PreparedPulse {
  int bin = 0;
  double excite = 0.0;
  double coherent = 1.0;
  double phase = 0.0;
  Laser laser = Laser::Red;
  double detuning = 0.0;
};

// Per-sequence constants hoisted out of the trajectory loop.
struct Prepared {
  std::vector<PreparedPulse> pulses;
  WindowLayout layout;
  bool random_laser_phase = false;
  double kick_sigma = 0.0;  // rad, per bin step
};

Prepared prepare(const PulseSequence& seq, const PhysicalParams& params) {
  validate(params);
  seq.check();
  Prepared p{{}, WindowLayout(params, seq.n_bins), false, 0.0};
  for (const auto& pulse : seq.pulses) {
    const auto d = dynamics::derive(dynamics::rotation_angle(pulse), params);
    p.pulses.push_back({pulse.bin_index, dynamics::excitation_probability(d.theta),
                        dynamics::coherent_fraction(d.gamma, d.rabi), pulse.phase, pulse.laser,
                        pulse.detuning});
  }
  p.random_laser_phase = !seq.lasers_phase_locked && !seq.single_laser();
  // <exp(i d)> = exp(-dt/T2) for d ~ N(0, 2 dt / T2).
  p.kick_sigma = std::sqrt(2.0 * params.bin_separation / params.t2_spin);
  return p;
}

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return phi <= -std::numbers::pi ? phi + kTwoPi : phi;
}

void sample(const Prepared& prep, const PulseSequence& seq, const PhysicalParams& params,
            Substream& rng, std::uint64_t id, std::vector<PhotonEvent>& out) {
  const std::size_t first = out.size();
  std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
  std::cauchy_distribution<double> incoherent_line(0.0, 0.5 * params.cavity_linewidth);

  if (seq.reset_before && params.reset_flash_rate > 0.0) {
    const int n = std::poisson_distribution<int>(params.reset_flash_rate)(rng);
    for (int i = 0; i < n; ++i)
      out.push_back({id, 0.0, incoherent_line(rng), Origin::ResetFlash, phase_dist(rng), -1});
  }

  const bool spin_h = rng.uniform() < params.p_hole_init;
  const double laser_offset = prep.random_laser_phase ? phase_dist(rng) : 0.0;
  // Spin phase picked up between consecutive bins.
  std::normal_distribution<double> kick(0.0, prep.kick_sigma);
  std::vector<double> amp_phase(static_cast<std::size_t>(seq.n_bins), 0.0);
  double spin_phase = 0.0;
  for (int k = 1; k < seq.n_bins; ++k) {
    spin_phase += kick(rng);
    amp_phase[static_cast<std::size_t>(k)] = spin_phase;
  }
  for (const auto& p : prep.pulses)
    amp_phase[static_cast<std::size_t>(p.bin)] +=
        p.phase + (p.laser == Laser::Blue ? laser_offset : 0.0);
  const double qubit_phase = wrap_phase(amp_phase[1] - amp_phase[0]);

  if (spin_h) {
    std::exponential_distribution<double> decay(1.0 / params.t1_radiative);
    for (const auto& p : prep.pulses) {
      if (!(rng.uniform() < p.excite)) continue;
      const bool coherent = rng.uniform() < p.coherent;
      double t = prep.layout.bin_start(p.bin) + decay(rng);
      if (params.detector_jitter > 0.0)
        t += std::normal_distribution<double>(0.0, params.detector_jitter)(rng);
      t = std::max(t, 0.0);
      if (coherent)
        out.push_back({id, t, p.detuning, Origin::CoherentRaman, qubit_phase, p.bin});
      else
        out.push_back({id, t, incoherent_line(rng), Origin::IncoherentDecay, phase_dist(rng), p.bin});
      break;  // the spin has flipped: no further scattering this repetition
    }
  }

  if (params.background_rate > 0.0) {
    const int n = std::poisson_distribution<int>(params.background_rate)(rng);
    std::uniform_real_distribution<double> when(0.0, prep.layout.length());
    for (int i = 0; i < n; ++i) {
      const double t = when(rng);
      out.push_back({id, t, incoherent_line(rng), Origin::Background, phase_dist(rng),
                     prep.layout.bin_of(t)});
    }
  }

  std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                   [](const PhotonEvent& a, const PhotonEvent& b) { return a.timestamp_ps < b.timestamp_ps; });
}

}  // namespace

std::vector<PhotonEvent> sample_trajectory(const PulseSequence& sequence, const PhysicalParams& params,
                                           Substream& rng, std::uint64_t trajectory_id) {
  const Prepared prep = prepare(sequence, params);
  std::vector<PhotonEvent> out;
  sample(prep, sequence, params, rng, trajectory_id, out);
  return out;
}

EventStream run(const PulseSequence& sequence, const PhysicalParams& params,
                std::uint64_t n_trajectories, std::uint64_t seed, Exec exec) {
  if (n_trajectories < 1) throw ConfigError({"trajectories: must be at least 1"});
  const Prepared prep = prepare(sequence, params);
  EventStream stream{params, sequence, seed, n_trajectories, {}};
  stream.events = detail::chunked_collect<PhotonEvent>(
      n_trajectories, exec, [&](std::size_t begin, std::size_t end, std::vector<PhotonEvent>& out) {
        for (std::size_t i = begin; i < end; ++i) {
          Substream rng(seed, StreamTag::Trajectory, i);
          sample(prep, sequence, params, rng, i, out);
        }
      });
  return stream;
}

}  // namespace mc
}  // namespace tbq
