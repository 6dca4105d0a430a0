#include "experiments.hpp"

#include <cmath>

#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"

namespace tbq::experiments {

Populations count_populations(const EventStream& gated) {
  Populations p;
  p.n_trajectories = gated.n_trajectories;
  for (const auto& e : gated.events) {
    if (e.bin_index == 0) ++p.early;
    else if (e.bin_index == 1) ++p.late;
  }
  return p;
}

PulseSequence power_sequence(double p_gen) {
  const double theta_late = 2.0 * std::asin(std::sqrt(p_gen));
  return two_pulse_sequence(0.5 * theta_late, theta_late);
}

QubitMeasurement measure_qubit(const PulseSequence& seq, const PhysicalParams& params,
                               const std::vector<double>& phases, std::uint64_t trajectories,
                               std::uint64_t seed, ScanMode mode, Exec exec) {
  QubitMeasurement m;
  const EventStream stream = measure::gate_default(mc::run(seq, params, trajectories, seed, exec));
  m.populations = count_populations(stream);
  m.scan = mode == ScanMode::SharedStream
               ? measure::fringe_scan(stream, phases, exec)
               : measure::fringe_scan(seq, params, phases, trajectories, mix64(seed + 0x5eed), exec);
  m.fit = tomo::fit_fringe(m.scan);
  const double q0 = m.populations.p_early(), q1 = m.populations.p_late();
  if (q0 + q1 > 0.0) {
    m.coherence = tomo::coherence_from_fringe(m.fit.visibility, q0, q1);
    const double balance = 2.0 * std::sqrt(q0 * q1) / (q0 + q1);
    m.coherence_error = balance > 0.0 ? m.fit.visibility_error / balance : 0.0;
  }
  return m;
}

PhaseQubitsResult phase_qubits(double theta_early, double theta_late, const std::vector<double>& setpoints,
                               const PhysicalParams& params, const std::vector<double>& phases,
                               std::uint64_t trajectories, std::uint64_t seed, ScanMode mode, Exec exec) {
  PhaseQubitsResult r;
  r.reference = measure_qubit(two_pulse_sequence(theta_early, theta_late), params, phases, trajectories,
                              mix64(seed), mode, exec);
  std::vector<double> wrapped;
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    PhaseSetpoint s;
    s.programmed = setpoints[i];
    s.measurement = measure_qubit(two_pulse_sequence(theta_early, theta_late, 0.0, setpoints[i]), params,
                                  phases, trajectories, mix64(seed ^ mix64(i + 1)), mode, exec);
    s.phase_difference = tomo::wrap(s.measurement.fit.phase - r.reference.fit.phase);
    wrapped.push_back(s.phase_difference);
    r.setpoints.push_back(std::move(s));
  }
  const auto unwrapped = tomo::unwrap(wrapped);
  for (std::size_t i = 0; i < r.setpoints.size(); ++i) {
    auto& s = r.setpoints[i];
    s.unwrapped = unwrapped[i];
    const auto& pop = s.measurement.populations;
    s.state.visibility = s.measurement.coherence;
    s.state.phase = s.phase_difference;
    s.state.bloch = tomo::reconstruct(pop.p_early(), pop.p_late(), s.measurement.coherence, s.phase_difference);
    s.state.fidelity =
        tomo::fidelity(s.state.bloch, {std::cos(s.programmed), std::sin(s.programmed), 0.0});
  }
  return r;
}

measure::G2Table g2_of(const PulseSequence& seq, const PhysicalParams& params, std::uint64_t trajectories,
                       std::uint64_t seed, int n_periods_window, Exec exec) {
  const EventStream stream = measure::gate_default(mc::run(seq, params, trajectories, seed, exec));
  return measure::hbt_g2(stream, measure::default_period(stream), n_periods_window, exec);
}

BackgroundCalibration calibrate_background(const PulseSequence& seq, const PhysicalParams& params,
                                           double target, std::uint64_t trajectories, std::uint64_t seed,
                                           int n_periods_window, Exec exec) {
  if (!(target > 0.0 && target < 1.0)) throw ConfigError({"target_g2: must lie in (0, 1)"});
  auto probe = [&](double rate) {
    PhysicalParams p = params;
    p.background_rate = rate;
    return g2_of(seq, p, trajectories, seed, n_periods_window, exec).at(0);
  };
  double lo = 0.0, hi = 0.01;
  while (probe(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 10.0) throw InsufficientStatistics("calibrate_background: target g2 not reachable");
  }
  BackgroundCalibration cal;
  for (cal.iterations = 0; cal.iterations < 40 && hi - lo > 1e-6 * hi; ++cal.iterations) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) < target ? lo : hi) = mid;
  }
  cal.background_rate = 0.5 * (lo + hi);
  cal.g2_zero = probe(cal.background_rate);
  return cal;
}

}  // namespace tbq::experiments
