#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "experiments.hpp"
#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"
#include "tbq/event_io.hpp"
#include "tbq/params.hpp"

namespace tbq::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

struct ExtraKey {
  const char* name;
  const char* unit;
  const char* fallback;
  const char* help;
};

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::uint64_t trajectories = 0;
  int threads = 0;
};

/// Parameter file contents after defaults, with experiment keys kept as text.
struct Resolved {
  PhysicalParams params;
  KeyValues extras;

  std::string text(const std::string& key) const { return extras.at(key); }

  double number(const std::string& key) const {
    const std::string& s = extras.at(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError({key + ": not a number: '" + s + "'"});
    return v;
  }

  int integer(const std::string& key, int lo, int hi) const {
    const double v = number(key);
    if (v != std::floor(v) || v < lo || v > hi)
      throw ConfigError({key + ": must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"});
    return static_cast<int>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(extras.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw ConfigError({key + ": empty list entry"});
      item = item.substr(b, e - b + 1);
      double v = 0.0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || p != item.data() + item.size())
        throw ConfigError({key + ": not a number: '" + item + "'"});
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError({key + ": empty list"});
    return out;
  }
};

Resolved resolve(const std::string& config_path, const std::vector<ExtraKey>& keys) {
  KeyValues kv = config_path.empty() ? KeyValues{} : parse_key_values_file(config_path);
  Resolved r;
  r.params = take_params(kv);
  for (const auto& k : keys) {
    auto it = kv.find(k.name);
    r.extras[k.name] = it == kv.end() ? k.fallback : it->second;
    if (it != kv.end()) kv.erase(it);
  }
  std::vector<std::string> errs;
  for (const auto& [k, v] : kv) errs.push_back(k + ": unknown key");
  try {
    validate(r.params);
  } catch (const ConfigError& e) {
    errs.insert(errs.end(), e.violations().begin(), e.violations().end());
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return r;
}

std::string key_listing(const std::vector<ExtraKey>& extras) {
  std::ostringstream os;
  os << "\nConfig keys (`name = value` per line, `#` comments):\n";
  for (const auto& k : param_keys()) os << "  " << k.name << " [" << k.unit << "]  " << k.help << '\n';
  for (const auto& k : extras)
    os << "  " << k.name << " [" << k.unit << "]  " << k.help << " (default " << k.fallback << ")\n";
  return os.str();
}

/// Files are written under `<out>.partial` and moved into place on commit,
/// so a failed run never leaves a half-written output directory.
class OutputDir {
 public:
  explicit OutputDir(const std::string& out) : final_(out), staging_(out + ".partial") {
    if (out.empty()) throw ConfigError({"--out: output directory required"});
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body, bool binary = false) {
    std::ofstream f(staging_ / name, binary ? std::ios::binary : std::ios::out);
    body(f);
    if (!f) throw std::runtime_error("failed writing " + name);
  }

  void commit() {
    fs::remove_all(final_);
    if (final_.has_parent_path()) fs::create_directories(final_.parent_path());
    fs::rename(staging_, final_);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path staging_;
  bool committed_ = false;
};

Json params_json(const PhysicalParams& p) {
  Json j;
  j["t1_radiative_ps"] = p.t1_radiative;
  j["t2_spin_ns"] = p.t2_spin;
  j["bin_separation_ns"] = p.bin_separation;
  j["pulse_duration_ps"] = p.pulse_duration;
  j["p_hole_init"] = p.p_hole_init;
  j["cavity_linewidth_uev"] = p.cavity_linewidth;
  j["background_rate"] = p.background_rate;
  j["detector_jitter_ps"] = p.detector_jitter;
  j["spin_splitting_uev"] = p.spin_splitting;
  j["reset_flash_rate"] = p.reset_flash_rate;
  return j;
}

Json sidecar(const std::string& command, const Common& c, const Resolved& r) {
  Json j;
  j["command"] = command;
  j["seed"] = c.seed;
  j["trajectories"] = c.trajectories;
  j["params"] = params_json(r.params);
  Json extras;
  for (const auto& [k, v] : r.extras) extras[k] = v;
  j["experiment"] = extras;
  return j;
}

void write_json(OutputDir& out, const Json& j) {
  out.write("run.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

Exec configure_threads(int threads) {
  if (threads < 0) throw ConfigError({"--threads: must be non-negative"});
  if (threads > 0) omp_set_num_threads(threads);
  return threads == 1 ? Exec::Serial : Exec::Parallel;
}

std::string indexed(const char* stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%02zu.csv", stem, i);
  return buf;
}

// ---------------------------------------------------------------------------

const std::vector<ExtraKey> kSweepKeys = {
    {"t1_list", "ps, list", "100,250,500,1000", "T1 values for the analytic curves"},
    {"grid_points", "count", "100", "p_gen grid p = i/N for i = 1..N"},
    {"mc_p_gen", "probability, list", "0.1,0.25,0.5,0.75,1", "drive powers simulated"},
    {"mc_t1", "ps", "250", "T1 used for the simulated points"},
    {"phase_points", "count", "12", "interferometer phases per fringe"},
};

void cmd_visibility_sweep(const Common& c, const std::vector<double>& t1_flag) {
  Resolved r = resolve(c.config, kSweepKeys);
  const Exec exec = configure_threads(c.threads);
  const auto t1_list = t1_flag.empty() ? r.list("t1_list") : t1_flag;
  const int grid_points = r.integer("grid_points", 1, 100000);
  const auto mc_p = r.list("mc_p_gen");
  const int n_phases = r.integer("phase_points", 8, 1000);
  std::vector<double> grid;
  for (int i = 1; i <= grid_points; ++i) grid.push_back(static_cast<double>(i) / grid_points);
  for (double t1 : t1_list)
    if (!(t1 > 0.0)) throw ConfigError({"t1_list: values must be positive"});
  for (double p : mc_p)
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError({"mc_p_gen: values must lie in (0, 1]"});

  OutputDir out(c.out);
  const auto curve = dynamics::visibility_curve(grid, t1_list, r.params);
  out.write("curve.csv", [&](std::ostream& os) { dynamics::write_csv(os, curve); });

  PhysicalParams mc_params = r.params;
  mc_params.t1_radiative = r.number("mc_t1");
  validate(mc_params);
  Json points = Json::array();
  std::ostringstream csv;
  csv << "p_gen,t1_ps,visibility,stderr,fringe_visibility,analytic,analytic_state\n";
  for (std::size_t i = 0; i < mc_p.size(); ++i) {
    const auto seq = experiments::power_sequence(mc_p[i]);
    const auto m = experiments::measure_qubit(seq, mc_params, measure::phase_grid(n_phases), c.trajectories,
                                              mix64(c.seed ^ mix64(i + 1)),
                                              experiments::ScanMode::FreshRunPerPoint, exec);
    const double analytic = dynamics::expected_visibility(mc_p[i], mc_params);
    const auto state = dynamics::generate_state(seq, mc_params);
    const double analytic_state = std::abs(state.coherence()) / std::sqrt(state.p_early() * state.p_late());
    csv << format_double(mc_p[i]) << ',' << format_double(mc_params.t1_radiative) << ','
        << format_double(m.coherence) << ',' << format_double(m.coherence_error) << ','
        << format_double(m.fit.visibility) << ',' << format_double(analytic) << ','
        << format_double(analytic_state) << '\n';
    points.push_back({{"p_gen", mc_p[i]}, {"visibility", m.coherence}, {"stderr", m.coherence_error},
                      {"analytic", analytic}});
  }
  out.write("mc_points.csv", [&](std::ostream& os) { os << csv.str(); });

  Json j = sidecar("visibility-sweep", c, r);
  j["t1_list_ps"] = t1_list;
  j["ceiling"] = dynamics::dephasing_factor(r.params);
  j["mc_points"] = points;
  write_json(out, j);
  out.commit();
}

// ---------------------------------------------------------------------------

const std::vector<ExtraKey> kPhaseKeys = {
    {"setpoints_pi", "units of pi, list",
     "0,0.21,0.42,0.58,0.84,1.05,1.26,1.47,1.68,1.89,2.1,2.31,2.52,2.73,2.94",
     "phase added to the late pulse, in order"},
    {"theta_early", "rad", "1.5707963267948966", "rotation of the early pulse"},
    {"theta_late", "rad", "3.141592653589793", "rotation of the late pulse"},
    {"phase_points", "count", "12", "interferometer phases per fringe"},
    {"scan_mode", "fresh|shared", "fresh", "new run per interferometer phase, or one shared stream"},
};

void cmd_phase_qubits(const Common& c) {
  Resolved r = resolve(c.config, kPhaseKeys);
  const Exec exec = configure_threads(c.threads);
  auto setpoints = r.list("setpoints_pi");
  for (double& s : setpoints) s *= kPi;
  const std::string mode_name = r.text("scan_mode");
  if (mode_name != "fresh" && mode_name != "shared") throw ConfigError({"scan_mode: expected fresh or shared"});
  const auto mode =
      mode_name == "fresh" ? experiments::ScanMode::FreshRunPerPoint : experiments::ScanMode::SharedStream;

  const auto res = experiments::phase_qubits(r.number("theta_early"), r.number("theta_late"), setpoints, r.params,
                                             measure::phase_grid(r.integer("phase_points", 8, 1000)),
                                             c.trajectories, c.seed, mode, exec);
  OutputDir out(c.out);
  out.write("fringe_reference.csv", [&](std::ostream& os) { measure::write_csv(os, res.reference.scan); });
  std::vector<tomo::ReconstructedState> states;
  std::ostringstream fits;
  fits << "setpoint_rad,phase_difference_rad,unwrapped_rad,phase_error_rad,visibility,visibility_error\n";
  for (std::size_t i = 0; i < res.setpoints.size(); ++i) {
    const auto& s = res.setpoints[i];
    out.write(indexed("fringe_setpoint", i), [&](std::ostream& os) { measure::write_csv(os, s.measurement.scan); });
    fits << format_double(s.programmed) << ',' << format_double(s.phase_difference) << ','
         << format_double(s.unwrapped) << ','
         << format_double(std::hypot(s.measurement.fit.phase_error, res.reference.fit.phase_error)) << ','
         << format_double(s.measurement.coherence) << ',' << format_double(s.measurement.coherence_error) << '\n';
    states.push_back(s.state);
  }
  out.write("phases.csv", [&](std::ostream& os) { os << fits.str(); });
  out.write("bloch.csv", [&](std::ostream& os) { tomo::write_csv(os, states); });

  Json j = sidecar("phase-qubits", c, r);
  j["reference"] = {{"visibility", res.reference.coherence}, {"phase_rad", res.reference.fit.phase}};
  write_json(out, j);
  out.commit();
}

// ---------------------------------------------------------------------------

const std::vector<ExtraKey> kWdmKeys = {
    {"red_detuning", "ueV", "-9.55", "red laser offset from the diagonal transition"},
    {"blue_detuning", "ueV", "9.55", "blue laser offset from the diagonal transition"},
    {"filter_fwhm", "ueV", "5", "spectral filter FWHM"},
    {"filter_extinction", "dimensionless", "0.001", "filter transmission floor"},
    {"phase_mode", "random|locked", "random", "inter-laser phase relation"},
    {"locked_phase", "rad", "0", "blue-minus-red phase in locked mode"},
    {"phase_points", "count", "12", "interferometer phases for the cross-bin fringe"},
};

void cmd_wdm(const Common& c) {
  Resolved r = resolve(c.config, kWdmKeys);
  const Exec exec = configure_threads(c.threads);
  wdm::WdmSpec spec;
  spec.red_detuning = r.number("red_detuning");
  spec.blue_detuning = r.number("blue_detuning");
  const std::string mode = r.text("phase_mode");
  if (mode == "locked") spec.phase_mode = wdm::Locked{r.number("locked_phase")};
  else if (mode != "random") throw ConfigError({"phase_mode: expected random or locked"});
  const wdm::FilterSettings filter{r.number("filter_fwhm"), r.number("filter_extinction")};

  const auto seq = wdm::build_wdm_sequence(spec, r.params);
  const EventStream stream = measure::gate_default(mc::run(seq, r.params, c.trajectories, c.seed, exec));
  const auto rows = wdm::recovery_report(stream, spec, filter, exec);
  // Fresh trajectories per interferometer phase keep the counts independent.
  const auto scan = measure::fringe_scan(seq, r.params, measure::phase_grid(r.integer("phase_points", 8, 1000)),
                                         c.trajectories, mix64(c.seed ^ 0xf1), exec);
  const auto fit = tomo::fit_fringe(scan);

  OutputDir out(c.out);
  out.write("recovery.csv", [&](std::ostream& os) { wdm::write_csv(os, rows); });
  const double res = r.params.bin_separation_ps() / 30.0;
  out.write("timetrace_none.csv", [&](std::ostream& os) { measure::write_csv(os, measure::time_histogram(stream, res)); });
  out.write("timetrace_red.csv", [&](std::ostream& os) {
    measure::write_csv(os, measure::time_histogram(measure::spectral_filter(stream, spec.red_detuning, filter.fwhm,
                                                                            filter.extinction, 1, exec), res));
  });
  out.write("timetrace_blue.csv", [&](std::ostream& os) {
    measure::write_csv(os, measure::time_histogram(measure::spectral_filter(stream, spec.blue_detuning, filter.fwhm,
                                                                            filter.extinction, 2, exec), res));
  });
  out.write("fringe_cross_color.csv", [&](std::ostream& os) { measure::write_csv(os, scan); });

  Json j = sidecar("wdm", c, r);
  j["cross_color_fringe"] = {{"visibility", fit.visibility}, {"visibility_error", fit.visibility_error}};
  write_json(out, j);
  out.commit();
}

// ---------------------------------------------------------------------------

const std::vector<ExtraKey> kG2Keys = {
    {"pulses_per_window", "count", "2", "1: one red pi pulse; 2: red and blue pulses (WDM sequence)"},
    {"calibrate", "true|false", "false", "bisect background_rate to reach target_g2 before measuring"},
    {"target_g2", "dimensionless", "0.01", "g2(0) aimed for when calibrating"},
    {"n_periods_window", "count", "5", "side peaks each side used for normalisation"},
};

void cmd_g2(const Common& c) {
  Resolved r = resolve(c.config, kG2Keys);
  const Exec exec = configure_threads(c.threads);
  const int pulses = r.integer("pulses_per_window", 1, 2);
  const int window = r.integer("n_periods_window", 1, 1000);
  const std::string calibrate = r.text("calibrate");
  if (calibrate != "true" && calibrate != "false") throw ConfigError({"calibrate: expected true or false"});

  PulseSequence seq = pulses == 2 ? wdm::build_wdm_sequence({}, r.params)
                                  : PulseSequence{2, {{0, intensity_for_angle(kPi), 0.0, Laser::Red, -9.55}}};
  Json j = sidecar("g2", c, r);
  PhysicalParams params = r.params;
  if (calibrate == "true") {
    const auto cal = experiments::calibrate_background(seq, params, r.number("target_g2"), c.trajectories,
                                                       mix64(c.seed ^ 0xca1b), window, exec);
    params.background_rate = cal.background_rate;
    j["calibration"] = {{"background_rate", cal.background_rate}, {"g2_zero", cal.g2_zero},
                        {"iterations", cal.iterations}};
  }
  const auto table = experiments::g2_of(seq, params, c.trajectories, c.seed, window, exec);

  OutputDir out(c.out);
  out.write("g2.csv", [&](std::ostream& os) { measure::write_csv(os, table); });
  j["g2_zero"] = table.at(0);
  j["g2_zero_sigma"] = table.sigma_at(0);
  j["background_rate_used"] = params.background_rate;
  write_json(out, j);
  out.commit();
}

// ---------------------------------------------------------------------------

const std::vector<ExtraKey> kSimulateKeys = {
    {"theta_early", "rad", "1.5707963267948966", "rotation of the early pulse"},
    {"theta_late", "rad", "3.141592653589793", "rotation of the late pulse"},
    {"phase_early", "rad", "0", "phase of the early pulse"},
    {"phase_late", "rad", "0", "phase of the late pulse"},
    {"format", "csv|binary|both", "both", "event file format"},
};

void cmd_simulate(const Common& c) {
  Resolved r = resolve(c.config, kSimulateKeys);
  const Exec exec = configure_threads(c.threads);
  const std::string format = r.text("format");
  if (format != "csv" && format != "binary" && format != "both")
    throw ConfigError({"format: expected csv, binary or both"});
  const auto seq = two_pulse_sequence(r.number("theta_early"), r.number("theta_late"), r.number("phase_early"),
                                      r.number("phase_late"));
  const EventStream stream = mc::run(seq, r.params, c.trajectories, c.seed, exec);

  OutputDir out(c.out);
  if (format != "binary")
    out.write("events.csv", [&](std::ostream& os) { io::write_events_csv(os, stream.events); });
  if (format != "csv")
    out.write("events.bin", [&](std::ostream& os) { io::write_events_binary(os, stream.events); }, true);
  Json j = sidecar("simulate", c, r);
  j["events"] = stream.events.size();
  write_json(out, j);
  out.commit();
}

void add_common(CLI::App* sub, Common& c, std::uint64_t default_trajectories, const std::vector<ExtraKey>& keys) {
  c.trajectories = default_trajectories;
  sub->add_option("--config", c.config, "parameter file (`name = value` lines)");
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out, "output directory")->required();
  sub->add_option("--trajectories", c.trajectories, "repetitions per run or per fringe point")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", c.threads, "OpenMP threads (0: runtime default, 1: serial reference path)");
  sub->footer(key_listing(keys));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Time-bin qubit generation simulator"};
  app.require_subcommand(1);
  Common sweep, phase, wdm_c, g2, sim;
  std::vector<double> t1_flag;

  auto* s1 = app.add_subcommand("visibility-sweep", "visibility vs generation probability, analytic and simulated");
  add_common(s1, sweep, 100000, kSweepKeys);
  s1->add_option("--t1", t1_flag, "comma-separated T1 values in ps (overrides t1_list)")->delimiter(',');
  auto* s2 = app.add_subcommand("phase-qubits", "phase-modulated qubits: fringes, fitted phases, Bloch vectors");
  add_common(s2, phase, 100000, kPhaseKeys);
  auto* s3 = app.add_subcommand("wdm", "two-colour multiplexing and spectral-filter recovery");
  add_common(s3, wdm_c, 100000, kWdmKeys);
  auto* s4 = app.add_subcommand("g2", "second-order correlation of the gated Raman light");
  add_common(s4, g2, 100000, kG2Keys);
  auto* s5 = app.add_subcommand("simulate", "raw Monte-Carlo event stream");
  add_common(s5, sim, 10000, kSimulateKeys);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*s1) cmd_visibility_sweep(sweep, t1_flag);
    else if (*s2) cmd_phase_qubits(phase);
    else if (*s3) cmd_wdm(wdm_c);
    else if (*s4) cmd_g2(g2);
    else if (*s5) cmd_simulate(sim);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << '\n';
    return kConfigError;
  } catch (const InsufficientStatistics& e) {
    std::cerr << "insufficient statistics: " << e.what() << '\n';
    return kInsufficientStatistics;
  }
  return kOk;
}

}  // namespace tbq::cli
