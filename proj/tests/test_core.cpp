#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tbq/detail/parallel.hpp"
#include "tbq/errors.hpp"
#include "tbq/params.hpp"
#include "tbq/pulse.hpp"
#include "tbq/rng.hpp"
#include "tbq/state.hpp"

using namespace tbq;
constexpr double kPi = std::numbers::pi;

namespace {

bool mentions(const ConfigError& e, const std::string& field) {
  return std::any_of(e.violations().begin(), e.violations().end(),
                     [&](const std::string& v) { return v.find(field) != std::string::npos; });
}

std::vector<std::string> violations_of(const PhysicalParams& p) {
  try {
    validate(p);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

}  // namespace

TEST_CASE("default parameters are valid") {
  CHECK_NOTHROW(validate(PhysicalParams{}));
  CHECK(PhysicalParams{}.bin_separation_ps() == 1500.0);
  CHECK(PhysicalParams{}.t2_spin_ps() == 6000.0);
}

TEST_CASE("each violated invariant names its field") {
  PhysicalParams p;
  p.t1_radiative = 0.0;
  p.t2_spin = -1.0;
  p.p_hole_init = 1.5;
  p.background_rate = -0.1;
  const auto v = violations_of(p);
  REQUIRE(v.size() == 4);
  try {
    validate(p);
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "t1_radiative"));
    CHECK(mentions(e, "t2_spin"));
    CHECK(mentions(e, "p_hole_init"));
    CHECK(mentions(e, "background_rate"));
  }
}

TEST_CASE("overlapping bins are rejected") {
  PhysicalParams p;
  p.pulse_duration = 1500.0;  // equals bin separation
  const auto v = violations_of(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("bin_separation") == 0);
  p.pulse_duration = 1499.0;
  CHECK(violations_of(p).empty());
}

TEST_CASE("NaN fails validation") {
  PhysicalParams p;
  p.detector_jitter = std::nan("");
  CHECK(violations_of(p).size() == 1);
}

TEST_CASE("key-value file: comments, whitespace, overrides") {
  std::istringstream in("# device\n  t1_radiative = 100   # ps\n\nbackground_rate=0.02\n");
  const auto p = load_params(in);
  CHECK(p.t1_radiative == 100.0);
  CHECK(p.background_rate == 0.02);
  CHECK(p.t2_spin == PhysicalParams{}.t2_spin);
}

TEST_CASE("key-value file: unknown keys, bad numbers and duplicates are rejected") {
  {
    std::istringstream in("t1_radiative = 100\nt1_radiativ = 3\n");
    CHECK_THROWS_AS(load_params(in), ConfigError);
  }
  {
    std::istringstream in("t1_radiative = fast\n");
    CHECK_THROWS_AS(load_params(in), ConfigError);
  }
  {
    std::istringstream in("t1_radiative = 100\nt1_radiative = 200\n");
    CHECK_THROWS_AS(load_params(in), ConfigError);
  }
  {
    std::istringstream in("t1_radiative\n");
    CHECK_THROWS_AS(load_params(in), ConfigError);
  }
  {
    std::istringstream in("t2_spin = 0\n");
    CHECK_THROWS_AS(load_params(in), ConfigError);
  }
}

TEST_CASE("take_params leaves foreign keys for the caller") {
  std::istringstream in("t1_radiative = 300\nphase_points = 12\n");
  auto kv = parse_key_values(in);
  const auto p = take_params(kv);
  CHECK(p.t1_radiative == 300.0);
  REQUIRE(kv.size() == 1);
  CHECK(kv.begin()->first == "phase_points");
}

TEST_CASE("write_params round-trips exactly") {
  PhysicalParams p;
  p.t1_radiative = 123.456789012345;
  p.background_rate = 1.0 / 3.0;
  p.detector_jitter = 1e-7;
  std::stringstream ss;
  write_params(ss, p);
  CHECK(load_params(ss) == p);
}

TEST_CASE("param_keys covers every field once") {
  const auto& keys = param_keys();
  CHECK(keys.size() == 10);
  std::stringstream ss;
  write_params(ss, PhysicalParams{});
  const std::string text = ss.str();
  for (const auto& k : keys) {
    CHECK(text.find(std::string(k.name) + " = ") != std::string::npos);
    CHECK(std::string(k.unit).size() > 0);
  }
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(250.0) == "250");
  CHECK(std::stod(format_double(kPi)) == kPi);
}

// --- pulses and timing ---------------------------------------------------

TEST_CASE("intensity calibration: pi/2 at reference intensity, pi at four times") {
  CHECK(intensity_for_angle(kReferenceAngle) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(intensity_for_angle(kPi) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(intensity_for_angle(0.0) == 0.0);
}

TEST_CASE("PulseSequence::check") {
  PulseSequence ok = two_pulse_sequence(kPi / 2, kPi);
  CHECK_NOTHROW(ok.check());
  CHECK(ok.single_laser());
  REQUIRE(ok.pulse_in_bin(1) != nullptr);
  CHECK(ok.pulse_in_bin(1)->intensity == doctest::Approx(4.0));
  CHECK(ok.pulse_in_bin(2) == nullptr);

  PulseSequence bad = ok;
  bad.pulses[1].bin_index = 2;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = ok;
  bad.pulses[0].intensity = -1.0;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = ok;
  std::swap(bad.pulses[0], bad.pulses[1]);
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = ok;
  bad.n_bins = 1;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = ok;
  bad.pulses[1].bin_index = 0;
  CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("window layout for the default device") {
  const WindowLayout lay(PhysicalParams{}, 2);
  CHECK(lay.bin_start(0) == 1500.0);
  CHECK(lay.bin_start(1) == 3000.0);
  CHECK(lay.guard() == 100.0);
  CHECK(lay.length() == 12000.0);
  CHECK(lay.gate_begin() == 1400.0);
  CHECK(lay.gate_end() == 4400.0);
  CHECK(lay.bin_of(0.0) == -1);
  CHECK(lay.bin_of(1400.0) == 0);
  CHECK(lay.bin_of(2899.9) == 0);
  CHECK(lay.bin_of(2900.0) == 1);
  CHECK(lay.bin_of(4400.0) == -1);  // past the last emission window
  CHECK(lay.window_begin(2) == 4400.0);
}

TEST_CASE("counting windows tile without gaps") {
  PhysicalParams p;
  p.detector_jitter = 50.0;
  for (int n = 2; n <= 5; ++n) {
    const WindowLayout lay(p, n);
    for (int k = 0; k < n; ++k) CHECK(lay.window_end(k) == lay.window_begin(k + 1));
    CHECK(lay.guard() <= lay.bin_separation() / 4);
    CHECK(lay.gate_end() < lay.length());
  }
}

// --- state -----------------------------------------------------------------

TEST_CASE("TimeBinState constructor rejects unphysical populations") {
  CHECK_THROWS_AS(TimeBinState(-0.1, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TimeBinState(0.6, 0.5, 0.0), std::invalid_argument);
  const TimeBinState s(0.25, 0.25, 0.1);
  CHECK(s.vacuum() == doctest::Approx(0.5));
}

TEST_CASE("purity bound") {
  CHECK(purity_bound(TimeBinState(0.25, 0.25, 0.25)));
  CHECK(purity_bound(TimeBinState(0.25, 0.25, std::polar(0.25, 1.3))));
  CHECK_FALSE(purity_bound(TimeBinState(0.25, 0.25, 0.2500001)));
  CHECK_FALSE(purity_bound(TimeBinState(0.0, 0.5, 0.01)));
}

TEST_CASE("Bloch vectors of pure states lie on the equator and poles") {
  const auto px = to_bloch(TimeBinState(0.2, 0.2, 0.2));
  CHECK(px.x == doctest::Approx(1.0));
  CHECK(px.y == doctest::Approx(0.0));
  CHECK(px.z == doctest::Approx(0.0));
  const auto py = to_bloch(TimeBinState(0.2, 0.2, std::complex<double>(0.0, -0.2)));
  CHECK(py.y == doctest::Approx(1.0));
  const auto early = to_bloch(TimeBinState(0.3, 0.0, 0.0));
  CHECK(early.z == doctest::Approx(1.0));
  CHECK_THROWS_AS(to_bloch(TimeBinState(0.0, 0.0, 0.0)), std::domain_error);
}

TEST_CASE("property: any state inside the purity bound maps inside the unit ball") {
  Substream rng(99, StreamTag::Trajectory, 0);
  for (int i = 0; i < 2000; ++i) {
    const double p0 = rng.uniform() * 0.5, p1 = rng.uniform() * 0.5;
    const double r = rng.uniform() * std::sqrt(p0 * p1);
    const TimeBinState s(p0, p1, std::polar(r, 2 * kPi * rng.uniform()));
    if (s.p_photon() == 0.0) continue;
    REQUIRE(purity_bound(s));
    CHECK(to_bloch(s).norm() <= 1.0 + kBlochNormTolerance);
  }
}

// --- rng -----------------------------------------------------------------

TEST_CASE("substreams are pure functions of their key") {
  Substream a(5, StreamTag::Trajectory, 17), b(5, StreamTag::Trajectory, 17);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  Substream c(5, StreamTag::Trajectory, 18), d(5, StreamTag::Interferometer, 17), e(5, StreamTag::Trajectory, 17, 1),
      f(6, StreamTag::Trajectory, 17);
  Substream a2(5, StreamTag::Trajectory, 17);
  const auto first = a2();
  CHECK(c() != first);
  CHECK(d() != first);
  CHECK(e() != first);
  CHECK(f() != first);
}

TEST_CASE("uniform(): Kolmogorov-Smirnov against U[0,1)") {
  Substream rng(2024, StreamTag::Filter, 3);
  std::vector<double> u(20000);
  for (auto& x : u) {
    x = rng.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  // 1% critical value of the KS statistic.
  CHECK(d * std::sqrt(n) < 1.63);
}

TEST_CASE("chunked_collect: serial and parallel concatenate in the same order") {
  auto fill = [](std::size_t b, std::size_t e, std::vector<std::size_t>& out) {
    for (std::size_t i = b; i < e; ++i)
      if (i % 3 != 0) out.push_back(i * i);
  };
  for (std::size_t n : {0ul, 1ul, 2047ul, 2048ul, 2049ul, 10000ul}) {
    const auto s = detail::chunked_collect<std::size_t>(n, Exec::Serial, fill);
    const auto p = detail::chunked_collect<std::size_t>(n, Exec::Parallel, fill);
    CHECK(s == p);
    CHECK(std::is_sorted(s.begin(), s.end()));
  }
}
