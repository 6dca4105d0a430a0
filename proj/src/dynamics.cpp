#include "tbq/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tbq/errors.hpp"

namespace tbq::dynamics {

double rotation_angle(double intensity, double reference_intensity, double reference_angle) {
  if (!(reference_intensity > 0.0))
    throw std::invalid_argument("rotation_angle: reference_intensity must be positive");
  if (!(intensity >= 0.0)) throw std::invalid_argument("rotation_angle: intensity must be non-negative");
  return reference_angle * std::sqrt(intensity / reference_intensity);
}

double rotation_angle(const ResonantPulse& pulse) {
  return rotation_angle(pulse.intensity, kReferenceIntensity, kReferenceAngle);
}

double excitation_probability(double theta) {
  const double s = std::sin(0.5 * theta);
  return std::clamp(s * s, 0.0, 1.0);
}

double coherent_fraction(double gamma, double rabi) {
  const double g2 = 2.0 * gamma * gamma;
  return g2 / (g2 + rabi * rabi);
}

DriveDerived derive(double theta, const PhysicalParams& params) {
  return {theta, theta / params.pulse_duration, 1.0 / params.t1_radiative};
}

double dephasing_factor(const PhysicalParams& params) {
  return std::exp(-params.bin_separation / params.t2_spin);
}

namespace {

struct PulseOutcome {
  double excite = 0.0;
  double coherent = 1.0;
};

PulseOutcome outcome(const ResonantPulse* pulse, const PhysicalParams& params) {
  if (!pulse) return {};
  const auto d = derive(rotation_angle(*pulse), params);
  return {excitation_probability(d.theta), coherent_fraction(d.gamma, d.rabi)};
}

void require_two_bins(const PulseSequence& seq) {
  seq.check();
  if (seq.n_bins != 2) throw ConfigError({"n_bins: analysis supports exactly 2 bins"});
  if (seq.pulses.size() > 2) throw ConfigError({"pulses: at most one pulse per bin"});
}

}  // namespace

CoherentWeights coherent_weights(const PulseSequence& seq, const PhysicalParams& params) {
  require_two_bins(seq);
  const auto first = outcome(seq.pulse_in_bin(0), params);
  const auto second = outcome(seq.pulse_in_bin(1), params);
  const double p0 = params.p_hole_init * first.excite;
  const double p1 = params.p_hole_init * (1.0 - first.excite) * second.excite;
  return {p0 * first.coherent, p1 * second.coherent, p0 * (1.0 - first.coherent),
          p1 * (1.0 - second.coherent)};
}

double coherent_photon_visibility(const PulseSequence& seq, const PhysicalParams& params) {
  const auto w = coherent_weights(seq, params);
  const double total = w.early + w.late;
  if (!(total > 0.0)) return 0.0;
  return std::min(1.0, 2.0 * std::sqrt(w.early * w.late) / total);
}

TimeBinState generate_state(const PulseSequence& seq, const PhysicalParams& params) {
  require_two_bins(seq);
  if (!seq.single_laser())
    throw ConfigError({"pulses: mixed laser colours; use the wdm module for two-colour sequences"});
  const ResonantPulse* a = seq.pulse_in_bin(0);
  const ResonantPulse* b = seq.pulse_in_bin(1);
  if (!a || !b) throw ConfigError({"pulses: need one pulse in each of the two bins"});

  const auto first = outcome(a, params);
  const auto second = outcome(b, params);
  const double p_early = params.p_hole_init * first.excite;
  const double p_late = params.p_hole_init * (1.0 - first.excite) * second.excite;
  const double magnitude = std::sqrt(p_early * p_late) * dephasing_factor(params) *
                           std::sqrt(first.coherent * second.coherent);
  TimeBinState s(p_early, p_late, std::polar(magnitude, a->phase - b->phase));
  assert(purity_bound(s));
  return s;
}

double expected_visibility(double p_gen, const PhysicalParams& params) {
  if (!(p_gen > 0.0 && p_gen <= 1.0))
    throw std::domain_error("expected_visibility: p_gen must lie in (0, 1]");
  const double theta_late = 2.0 * std::asin(std::sqrt(p_gen));
  const auto d = derive(theta_late, params);
  return dephasing_factor(params) * coherent_fraction(d.gamma, d.rabi);
}

VisibilityCurve visibility_curve(const std::vector<double>& p_gen_grid,
                                 const std::vector<double>& t1_list, const PhysicalParams& params) {
  VisibilityCurve curve{p_gen_grid, t1_list, {}};
  curve.visibility.reserve(t1_list.size());
  for (double t1 : t1_list) {
    PhysicalParams p = params;
    p.t1_radiative = t1;
    std::vector<double> row;
    row.reserve(p_gen_grid.size());
    for (double pg : p_gen_grid) row.push_back(expected_visibility(pg, p));
    curve.visibility.push_back(std::move(row));
  }
  return curve;
}

void write_csv(std::ostream& out, const VisibilityCurve& curve) {
  out << "p_gen,t1_ps,visibility\n";
  for (std::size_t r = 0; r < curve.t1_ps.size(); ++r)
    for (std::size_t c = 0; c < curve.p_gen.size(); ++c)
      out << format_double(curve.p_gen[c]) << ',' << format_double(curve.t1_ps[r]) << ','
          << format_double(curve.visibility[r][c]) << '\n';
}

}  // namespace tbq::dynamics
