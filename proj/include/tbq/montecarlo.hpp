#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tbq/params.hpp"
#include "tbq/pulse.hpp"
#include "tbq/rng.hpp"

namespace tbq {

enum class Origin : std::uint8_t { CoherentRaman = 0, IncoherentDecay = 1, Background = 2, ResetFlash = 3 };

std::string_view to_string(Origin origin);
/// Inverse of to_string; throws std::invalid_argument.
Origin origin_from_string(std::string_view name);

/// One detected photon.
///
/// `phase_rad` is the phase the photon carries into an interferometer. For
/// CoherentRaman photons it is the relative phase of the late-bin amplitude
/// with respect to the early-bin amplitude of the superposition the photon
/// was scattered into: late pulse phase - early pulse phase + spin phase
/// accumulated between the bins. Other origins carry a uniform random phase.
struct PhotonEvent {
  std::uint64_t trajectory_id = 0;
  double timestamp_ps = 0.0;  // from the start of the repetition window
  double energy_uev = 0.0;    // relative to the undetuned transition
  Origin origin = Origin::Background;
  double phase_rad = 0.0;
  int bin_index = -1;  // emission bin, or the counting window for stray light; -1 if none

  bool operator==(const PhotonEvent&) const = default;
};

/// Events sorted by (trajectory_id, timestamp). Carries the inputs that
/// produced it so downstream kernels can derive their own substreams.
struct EventStream {
  PhysicalParams params;
  PulseSequence sequence;
  std::uint64_t seed = 0;
  std::uint64_t n_trajectories = 0;
  std::vector<PhotonEvent> events;
};

/// Stable per-event key for substream derivation; survives filtering.
std::uint64_t event_key(const PhotonEvent& e);

namespace mc {

/// Samples one repetition of `sequence`.
///
/// The spin starts in |h> with probability p_hole_init. Pulses act in bin
/// order; a pulse can only scatter while no photon has been emitted yet and
/// the spin is in |h>. An emitted photon is coherent Raman with probability
/// coherent_fraction(G, W_i), otherwise incoherent decay. Timestamps are
/// bin start + Exp(T1) + N(0, jitter). Background photons (Poisson
/// background_rate) fall uniformly over the window; reset flashes (Poisson
/// reset_flash_rate) sit at t = 0 when the sequence has a reset.
std::vector<PhotonEvent> sample_trajectory(const PulseSequence& sequence, const PhysicalParams& params,
                                           Substream& rng, std::uint64_t trajectory_id = 0);

/// Runs `n_trajectories` repetitions. Trajectory i draws only from
/// Substream(seed, Trajectory, i), so output is bit-identical for either
/// Exec policy and any thread count.
EventStream run(const PulseSequence& sequence, const PhysicalParams& params,
                std::uint64_t n_trajectories, std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace mc
}  // namespace tbq
