#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"
#include "tbq/measurement.hpp"

using namespace tbq;
using namespace tbq::measure;
constexpr double kPi = std::numbers::pi;

namespace {

PhysicalParams quiet() {
  PhysicalParams p;
  p.reset_flash_rate = 0.0;
  return p;
}

bool within(double observed, double expected, double sigma, double k = 4.0) {
  return std::abs(observed - expected) <= k * sigma;
}

// Transmission of Cauchy(0, hwhm) light through a unit-peak Lorentzian
// filter with a floor, by midpoint quadrature after the substitution
// E = hwhm * tan(u), which maps the density onto a uniform one.
double leakage_quadrature(double hwhm, double center, double fwhm, double floor) {
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = -kPi / 2 + kPi * (i + 0.5) / n;
    sum += std::max(lorentzian(hwhm * std::tan(u), center, fwhm), floor);
  }
  return sum / n;
}

}  // namespace

TEST_CASE("gate is half-open and keeps the stream metadata") {
  EventStream s;
  s.seed = 9;
  s.n_trajectories = 3;
  s.events = {{0, 0.0, 0, Origin::ResetFlash, 0, -1},
              {0, 1400.0, 0, Origin::CoherentRaman, 0, 0},
              {1, 4399.9, 0, Origin::CoherentRaman, 0, 1},
              {2, 4400.0, 0, Origin::Background, 0, 2}};
  const auto g = gate_default(s);
  REQUIRE(g.events.size() == 2);
  CHECK(g.events[0].timestamp_ps == 1400.0);
  CHECK(g.seed == 9);
  CHECK(g.n_trajectories == 3);
  CHECK_THROWS_AS(gate(s, 10.0, 10.0), ConfigError);
}

TEST_CASE("Lorentzian: unit peak, half at half width") {
  CHECK(lorentzian(3.0, 3.0, 5.0) == 1.0);
  CHECK(lorentzian(5.5, 3.0, 5.0) == doctest::Approx(0.5));
  // 19.1 ueV between the colours, 5 ueV filter.
  CHECK(lorentzian(-9.55, 9.55, 5.0) == doctest::Approx(0.016843637147631110871557160567).epsilon(1e-14));
}

TEST_CASE("leakage quadrature agrees with the Lorentzian convolution identity") {
  // Without a floor the transmitted share of a Cauchy line is closed form.
  const double g = 1.3, c = 9.55, f = 5.0;
  const double closed = (f / 2) * (g + f / 2) / ((g + f / 2) * (g + f / 2) + c * c);
  CHECK(leakage_quadrature(g, c, f, 0.0) == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("spectral filter transmits at the quadrature rate") {
  PhysicalParams p = quiet();
  p.p_hole_init = 1.0;
  p.t1_radiative = 5000.0;  // slow decay: mostly incoherent light
  const std::uint64_t n = 100000;
  const auto stream = mc::run(two_pulse_sequence(kPi, kPi), p, n, 31);
  EventStream incoherent = stream;
  incoherent.events.clear();
  for (const auto& e : stream.events)
    if (e.origin == Origin::IncoherentDecay) incoherent.events.push_back(e);
  REQUIRE(incoherent.events.size() > 10000);
  const double center = 4.0, fwhm = 5.0, floor = 1e-3;
  const auto kept = spectral_filter(incoherent, center, fwhm, floor, 0);
  const double expected = leakage_quadrature(0.5 * p.cavity_linewidth, center, fwhm, floor);
  const double m = static_cast<double>(incoherent.events.size());
  CHECK(within(kept.events.size() / m, expected, std::sqrt(expected * (1 - expected) / m)));
}

TEST_CASE("spectral filter: coherent photons pass at the Lorentzian value") {
  PhysicalParams p = quiet();
  p.p_hole_init = 1.0;
  const auto seq = two_pulse_sequence(kPi, 0.0, 0.0, 0.0, Laser::Red, -9.55);
  const auto stream = gate_default(mc::run(seq, p, 300000, 3));
  EventStream coherent = stream;
  coherent.events.clear();
  for (const auto& e : stream.events)
    if (e.origin == Origin::CoherentRaman) coherent.events.push_back(e);
  const auto kept = spectral_filter(coherent, 9.55, 5.0, 1e-3, 0);
  const double t = lorentzian(-9.55, 9.55, 5.0);
  const double m = static_cast<double>(coherent.events.size());
  CHECK(within(kept.events.size() / m, t, std::sqrt(t * (1 - t) / m)));
}

TEST_CASE("spectral filter: serial equals parallel, salt selects a new draw, bad settings throw") {
  const auto stream = mc::run(two_pulse_sequence(kPi / 2, kPi), PhysicalParams{}, 20000, 5);
  const auto a = spectral_filter(stream, 0.0, 2.0, 0.0, 1, Exec::Serial);
  const auto b = spectral_filter(stream, 0.0, 2.0, 0.0, 1, Exec::Parallel);
  const auto c = spectral_filter(stream, 0.0, 2.0, 0.0, 2, Exec::Parallel);
  CHECK(a.events == b.events);
  CHECK(a.events != c.events);
  CHECK_THROWS_AS(spectral_filter(stream, 0.0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(spectral_filter(stream, 0.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("filtering is idempotent per event: a kept photon survives a refilter with the same salt") {
  const auto stream = mc::run(two_pulse_sequence(kPi / 2, kPi), PhysicalParams{}, 20000, 6);
  const auto once = spectral_filter(stream, 0.5, 3.0, 0.0, 4);
  const auto twice = spectral_filter(once, 0.5, 3.0, 0.0, 4);
  CHECK(once.events == twice.events);
}

// --- interferometer ---------------------------------------------------------

TEST_CASE("Michelson peaks match the closed form for the generated state") {
  const PhysicalParams p = quiet();
  const auto seq = two_pulse_sequence(kPi / 2, kPi, 0.0, 0.4);
  const auto state = dynamics::generate_state(seq, p);
  const std::uint64_t n = 400000;
  const auto stream = gate_default(mc::run(seq, p, n, 77));
  const WindowLayout lay(p, 2);
  for (double phi : {0.0, 1.0, 2.5, 4.0}) {
    const auto peaks = peak_counts(michelson(stream, phi), lay);
    const auto want = michelson_expectation(state, phi);
    auto check_peak = [&](std::uint64_t got, double frac) {
      CHECK(within(static_cast<double>(got) / n, frac, std::sqrt(frac * (1 - frac) / n)));
    };
    check_peak(peaks.early, want.early);
    check_peak(peaks.middle, want.middle);
    check_peak(peaks.late, want.late);
  }
}

TEST_CASE("closed-form peaks: fringe contrast is 2|rho01| / p") {
  const TimeBinState s(0.2, 0.3, std::polar(0.15, 0.7));
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 3600; ++i) {
    const double m = michelson_expectation(s, 2 * kPi * i / 3600).middle;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK((hi - lo) / (hi + lo) == doctest::Approx(2 * 0.15 / 0.5).epsilon(1e-5));
  const auto e = michelson_expectation(s, 0.0);
  CHECK(e.early == doctest::Approx(0.05));
  CHECK(e.late == doctest::Approx(0.075));
}

TEST_CASE("Michelson histogram layout") {
  const PhysicalParams p;
  const auto stream = gate_default(mc::run(two_pulse_sequence(kPi / 2, kPi), p, 5000, 2));
  const auto h = michelson(stream, 0.0, {0.0, 0, Exec::Serial});
  CHECK(h.bin_edges.size() == h.counts.size() + 1);
  CHECK(h.bin_edges[1] - h.bin_edges[0] == doctest::Approx(50.0));
  const WindowLayout lay(p, 2);
  // Window boundaries fall on bin edges.
  for (int k = 0; k <= 3; ++k) {
    const double x = (lay.window_begin(k) - h.bin_edges.front()) / 50.0;
    CHECK(x == doctest::Approx(std::round(x)).epsilon(1e-12));
  }
  CHECK(h.n_input_events == stream.events.size());
  CHECK(h.total() <= stream.events.size());
  const auto hp = michelson(stream, 0.0, {0.0, 0, Exec::Parallel});
  CHECK(h.counts == hp.counts);
}

TEST_CASE("Michelson rejects streams with more than two occupied bins") {
  PulseSequence seq;
  seq.n_bins = 3;
  seq.pulses = {{0, 0.5, 0, Laser::Red, 0}, {1, 0.5, 0, Laser::Red, 0}, {2, 4.0, 0, Laser::Red, 0}};
  const auto stream = gate_default(mc::run(seq, PhysicalParams{}, 5000, 1));
  CHECK_THROWS_AS(michelson(stream, 0.0), ConfigError);
}

TEST_CASE("fringe scans need eight distinct phases") {
  const auto stream = gate_default(mc::run(two_pulse_sequence(kPi / 2, kPi), PhysicalParams{}, 2000, 1));
  CHECK_THROWS_AS(fringe_scan(stream, phase_grid(7)), ConfigError);
  CHECK_THROWS_AS(fringe_scan(stream, {0, 0, 0, 0, 0, 0, 0, 0, 0, 2 * kPi}), ConfigError);
  CHECK(fringe_scan(stream, phase_grid(8)).middle_counts.size() == 8);
}

TEST_CASE("fringe scan: serial and parallel agree, both modes") {
  const auto seq = two_pulse_sequence(kPi / 2, kPi);
  const PhysicalParams p;
  const auto a = fringe_scan(seq, p, phase_grid(8), 3000, 5, Exec::Serial);
  const auto b = fringe_scan(seq, p, phase_grid(8), 3000, 5, Exec::Parallel);
  CHECK(a.middle_counts == b.middle_counts);
  CHECK(a.side_counts == b.side_counts);
  const auto stream = gate_default(mc::run(seq, p, 3000, 5));
  CHECK(fringe_scan(stream, phase_grid(8), Exec::Serial).middle_counts ==
        fringe_scan(stream, phase_grid(8), Exec::Parallel).middle_counts);
}

TEST_CASE("time histogram counts every event inside the window") {
  PhysicalParams p;
  p.background_rate = 0.5;
  const auto stream = mc::run(two_pulse_sequence(kPi / 2, kPi), p, 5000, 8);
  const auto h = time_histogram(stream, 50.0);
  CHECK(h.total() == stream.events.size());
  CHECK(h.sum_between(0.0, 50.0) > 0);  // reset flashes at t = 0
}

TEST_CASE("CSV headers") {
  std::ostringstream a, b, c;
  Histogram h{{0, 50, 100}, {3, 4}, 0, 0, 0};
  write_csv(a, h);
  CHECK(a.str() == "bin_start_ps,bin_end_ps,counts\n0,50,3\n50,100,4\n");
  write_csv(b, FringeScan{{0.0, 0.5}, {1, 2}, {3, 4}});
  CHECK(b.str() == "phase_rad,middle_counts,side_counts\n0,1,3\n0.5,2,4\n");
  G2Table t;
  t.lag_periods = {-1, 0, 1};
  t.g2 = {1.0, 0.0, 1.0};
  write_csv(c, t);
  CHECK(c.str() == "lag_periods,g2\n-1,1\n0,0\n1,1\n");
}

// --- HBT ------------------------------------------------------------------------

TEST_CASE("g2: a single-photon source without background has no zero-delay coincidences") {
  const auto stream = gate_default(mc::run(two_pulse_sequence(kPi / 2, kPi), quiet(), 100000, 9));
  const auto t = hbt_g2(stream, default_period(stream));
  CHECK(t.at(0) == 0.0);
  CHECK(t.coincidences[5] == 0);
  for (int k = 1; k <= 5; ++k) CHECK(within(t.at(k), 1.0, t.sigma_at(k)));
}

TEST_CASE("g2: Poisson light gives one at zero delay") {
  PhysicalParams p = quiet();
  p.p_hole_init = 0.0;
  p.background_rate = 0.5;
  const auto stream = gate_default(mc::run(two_pulse_sequence(kPi / 2, kPi), p, 100000, 10));
  const auto t = hbt_g2(stream, default_period(stream));
  CHECK(within(t.at(0), 1.0, t.sigma_at(0), 3.0));
}

TEST_CASE("g2: serial and parallel agree") {
  PhysicalParams p;
  p.background_rate = 0.05;
  const auto stream = gate_default(mc::run(two_pulse_sequence(kPi / 2, kPi), p, 30000, 12));
  const auto a = hbt_g2(stream, default_period(stream), 5, Exec::Serial);
  const auto b = hbt_g2(stream, default_period(stream), 5, Exec::Parallel);
  CHECK(a.coincidences == b.coincidences);
  CHECK(a.g2 == b.g2);
}

TEST_CASE("g2: empty stream and bad arguments") {
  EventStream empty;
  empty.n_trajectories = 10;
  CHECK_THROWS_AS(hbt_g2(empty, 12000.0), InsufficientStatistics);
  CHECK_THROWS_AS(hbt_g2(empty, 0.0), ConfigError);
  CHECK_THROWS_AS(hbt_g2(empty, 12000.0, 0), ConfigError);
}
