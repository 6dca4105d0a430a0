#include "tbq/wdm.hpp"

#include <cmath>
#include <ostream>

#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"
#include "tbq/measurement.hpp"

namespace tbq::wdm {

void WdmSpec::check() const {
  std::vector<std::string> errs;
  if (red_detuning == blue_detuning) errs.push_back("detuning: colors must differ");
  else if (!(red_detuning < 0.0 && blue_detuning > 0.0))
    errs.push_back("detuning: need red_detuning < 0 < blue_detuning");
  if (red_bin == blue_bin || red_bin < 0 || red_bin > 1 || blue_bin < 0 || blue_bin > 1)
    errs.push_back("bins: red and blue must occupy distinct bins 0 and 1");
  if (!(red_angle > 0.0 && red_angle < std::numbers::pi))
    errs.push_back("red_angle: must lie in (0, pi)");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

PulseSequence build_wdm_sequence(const WdmSpec& spec, const PhysicalParams& params) {
  spec.check();
  validate(params);
  // Equal output: e_first = (1 - e_first) e_second. Only reachable for
  // e_first <= 1/2; otherwise the second pulse is a full pi pulse.
  const double e_first = dynamics::excitation_probability(spec.red_angle);
  const double e_second = std::min(1.0, e_first / (1.0 - e_first));
  const double second_angle = 2.0 * std::asin(std::sqrt(e_second));

  const double blue_phase = std::holds_alternative<Locked>(spec.phase_mode)
                                ? std::get<Locked>(spec.phase_mode).phase
                                : 0.0;
  const ResonantPulse red{spec.red_bin, intensity_for_angle(spec.red_bin == 0 ? spec.red_angle : second_angle),
                          0.0, Laser::Red, spec.red_detuning};
  const ResonantPulse blue{spec.blue_bin,
                           intensity_for_angle(spec.blue_bin == 0 ? spec.red_angle : second_angle), blue_phase,
                           Laser::Blue, spec.blue_detuning};
  PulseSequence seq;
  seq.n_bins = 2;
  seq.pulses = spec.red_bin == 0 ? std::vector{red, blue} : std::vector{blue, red};
  seq.lasers_phase_locked = std::holds_alternative<Locked>(spec.phase_mode);
  return seq;
}

WdmState wdm_state(const WdmSpec& spec, const PhysicalParams& params) {
  const PulseSequence seq = build_wdm_sequence(spec, params);
  const auto first = dynamics::excitation_probability(dynamics::rotation_angle(seq.pulses[0]));
  const auto second = dynamics::excitation_probability(dynamics::rotation_angle(seq.pulses[1]));
  const double p_first = params.p_hole_init * first;
  const double p_second = params.p_hole_init * (1.0 - first) * second;
  const bool red_first = spec.red_bin == 0;
  auto in_bin = [](int bin, double p) { return bin == 0 ? TimeBinState(p, 0.0, 0.0) : TimeBinState(0.0, p, 0.0); };
  return {in_bin(spec.red_bin, red_first ? p_first : p_second),
          in_bin(spec.blue_bin, red_first ? p_second : p_first),
          std::holds_alternative<Locked>(spec.phase_mode)};
}

namespace {

RecoveryRow split(const std::string& name, const EventStream& filtered, std::uint64_t total) {
  std::uint64_t early = 0, late = 0;
  for (const auto& e : filtered.events) {
    if (e.bin_index == 0) ++early;
    else if (e.bin_index == 1) ++late;
  }
  const std::uint64_t n = early + late;
  if (n == 0) throw InsufficientStatistics("recovery_report: filter '" + name + "' transmitted no events");
  return {name, static_cast<double>(early) / static_cast<double>(n),
          static_cast<double>(late) / static_cast<double>(n), n, total};
}

}  // namespace

std::vector<RecoveryRow> recovery_report(const EventStream& stream, const WdmSpec& spec,
                                         const FilterSettings& filter, Exec exec) {
  spec.check();
  std::uint64_t total = 0;
  for (const auto& e : stream.events) total += (e.bin_index == 0 || e.bin_index == 1);
  std::vector<RecoveryRow> rows;
  rows.push_back(split("none", stream, total));
  rows.push_back(split("red",
                       measure::spectral_filter(stream, spec.red_detuning, filter.fwhm, filter.extinction, 1, exec),
                       total));
  rows.push_back(split("blue",
                       measure::spectral_filter(stream, spec.blue_detuning, filter.fwhm, filter.extinction, 2, exec),
                       total));
  return rows;
}

void write_csv(std::ostream& out, const std::vector<RecoveryRow>& rows) {
  out << "filter,early_frac,late_frac,transmitted,total\n";
  for (const auto& r : rows)
    out << r.filter << ',' << format_double(r.early_frac) << ',' << format_double(r.late_frac) << ','
        << r.transmitted << ',' << r.total << '\n';
}

}  // namespace tbq::wdm
