#pragma once

#include <iosfwd>
#include <vector>

#include "tbq/montecarlo.hpp"

namespace tbq::io {

/// Header `trajectory_id,timestamp_ps,energy_uev,origin,phase_rad,bin_index`.
/// Doubles use the shortest round-trip representation.
void write_events_csv(std::ostream& out, const std::vector<PhotonEvent>& events);
std::vector<PhotonEvent> read_events_csv(std::istream& in);

// Binary layout, all integers and IEEE-754 doubles little-endian:
//
//   offset  size  field
//   0       8     magic "TBQEVT01"
//   8       8     u64 record count
//   16      40*n  records
//
// record:
//   0   8  u64 trajectory_id
//   8   8  f64 timestamp_ps
//   16  8  f64 energy_uev
//   24  8  f64 phase_rad
//   32  4  i32 bin_index
//   36  1  u8  origin (0 CoherentRaman, 1 IncoherentDecay, 2 Background, 3 ResetFlash)
//   37  3  zero padding
inline constexpr std::size_t kBinaryRecordSize = 40;

void write_events_binary(std::ostream& out, const std::vector<PhotonEvent>& events);
std::vector<PhotonEvent> read_events_binary(std::istream& in);

}  // namespace tbq::io
