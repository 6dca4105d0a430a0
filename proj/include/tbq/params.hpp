#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tbq {

/// Device and laser constants. Units are part of the field contract and are
/// fixed: they are the units used in parameter files as well.
struct PhysicalParams {
  double t1_radiative = 250.0;       // ps, radiative decay time of the enhanced transition
  double t2_spin = 6.0;              // ns, hole-spin coherence time
  double bin_separation = 1.5;       // ns, early/late spacing
  double pulse_duration = 1000.0;    // ps, square resonant pulse length
  double p_hole_init = 0.5;          // probability reset leaves the spin in |h>
  double cavity_linewidth = 2.6328;  // ueV, FWHM of incoherent emission (hbar/T1 at 250 ps)
  double background_rate = 0.0;      // mean spurious photons per sequence window
  double detector_jitter = 20.0;     // ps, Gaussian sigma
  double spin_splitting = 95.0;      // ueV, Raman shift (bookkeeping only)
  double reset_flash_rate = 0.1;     // mean non-resonant flash photons per window

  double bin_separation_ps() const { return bin_separation * 1000.0; }
  double t2_spin_ps() const { return t2_spin * 1000.0; }

  bool operator==(const PhysicalParams&) const = default;
};

/// Returns `params` unchanged if every invariant holds, otherwise throws
/// ConfigError listing each violated invariant by field name.
const PhysicalParams& validate(const PhysicalParams& params);

struct ParamKey {
  const char* name;
  const char* unit;
  const char* help;
};

/// Every key accepted in a parameter file, in file order.
const std::vector<ParamKey>& param_keys();

/// Flat `name = value` text, `#` comments. Values are kept as strings so
/// callers can consume the keys they know and reject the rest.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues parse_key_values_file(const std::string& path);

/// Consumes the PhysicalParams keys out of `kv` (erasing them) on top of
/// `base`. Leaves unknown keys in place for the caller.
PhysicalParams take_params(KeyValues& kv, const PhysicalParams& base = {});

/// Strict loader: unknown keys are an error. The result is validated.
PhysicalParams load_params(std::istream& in);

void write_params(std::ostream& out, const PhysicalParams& params);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace tbq
