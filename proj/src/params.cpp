#include "tbq/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "tbq/errors.hpp"

namespace tbq {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double* field(PhysicalParams& p, std::string_view name) {
  if (name == "t1_radiative") return &p.t1_radiative;
  if (name == "t2_spin") return &p.t2_spin;
  if (name == "bin_separation") return &p.bin_separation;
  if (name == "pulse_duration") return &p.pulse_duration;
  if (name == "p_hole_init") return &p.p_hole_init;
  if (name == "cavity_linewidth") return &p.cavity_linewidth;
  if (name == "background_rate") return &p.background_rate;
  if (name == "detector_jitter") return &p.detector_jitter;
  if (name == "spin_splitting") return &p.spin_splitting;
  if (name == "reset_flash_rate") return &p.reset_flash_rate;
  return nullptr;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_lines(violations)), violations_(std::move(violations)) {}

const std::vector<ParamKey>& param_keys() {
  static const std::vector<ParamKey> keys = {
      {"t1_radiative", "ps", "radiative decay time T1 of the cavity-enhanced transition"},
      {"t2_spin", "ns", "hole-spin coherence time T2"},
      {"bin_separation", "ns", "early/late time-bin spacing"},
      {"pulse_duration", "ps", "square resonant pulse length"},
      {"p_hole_init", "probability", "chance the reset prepares the drive-addressable spin state"},
      {"cavity_linewidth", "ueV", "FWHM of the incoherent emission lineshape"},
      {"background_rate", "photons/window", "mean spurious photons per sequence window"},
      {"detector_jitter", "ps", "Gaussian timing jitter sigma"},
      {"spin_splitting", "ueV", "Raman shift between drive and scattered photon"},
      {"reset_flash_rate", "photons/window", "mean photons leaked by the non-resonant reset"},
  };
  return keys;
}

const PhysicalParams& validate(const PhysicalParams& p) {
  std::vector<std::string> errs;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) errs.push_back(std::string(name) + " must be positive");
  };
  auto non_negative = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) errs.push_back(std::string(name) + " must be non-negative");
  };
  positive(p.t1_radiative, "t1_radiative");
  positive(p.t2_spin, "t2_spin");
  positive(p.bin_separation, "bin_separation");
  positive(p.pulse_duration, "pulse_duration");
  positive(p.cavity_linewidth, "cavity_linewidth");
  positive(p.spin_splitting, "spin_splitting");
  // Zero jitter is an idealised detector, not an invalid one.
  non_negative(p.detector_jitter, "detector_jitter");
  non_negative(p.background_rate, "background_rate");
  non_negative(p.reset_flash_rate, "reset_flash_rate");
  if (!(p.p_hole_init >= 0.0 && p.p_hole_init <= 1.0))
    errs.push_back("p_hole_init must lie in [0, 1]");
  if (p.bin_separation > 0.0 && p.pulse_duration > 0.0 &&
      !(p.bin_separation_ps() > p.pulse_duration))
    errs.push_back("bin_separation: bins must not overlap (bin_separation must exceed pulse_duration)");
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return p;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::vector<std::string> errs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected `name = value`");
      continue;
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      errs.push_back("line " + std::to_string(lineno) + ": empty key or value");
      continue;
    }
    if (!kv.emplace(key, value).second)
      errs.push_back(key + ": duplicate key on line " + std::to_string(lineno));
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return kv;
}

KeyValues parse_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
  return parse_key_values(in);
}

PhysicalParams take_params(KeyValues& kv, const PhysicalParams& base) {
  PhysicalParams p = base;
  std::vector<std::string> errs;
  for (auto it = kv.begin(); it != kv.end();) {
    double* dst = field(p, it->first);
    if (!dst) {
      ++it;
      continue;
    }
    const std::string& s = it->second;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      errs.push_back(it->first + ": not a number: '" + s + "'");
    else
      *dst = v;
    it = kv.erase(it);
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return p;
}

PhysicalParams load_params(std::istream& in) {
  KeyValues kv = parse_key_values(in);
  PhysicalParams p = take_params(kv);
  if (!kv.empty()) {
    std::vector<std::string> errs;
    for (const auto& [k, v] : kv) errs.push_back(k + ": unknown key");
    throw ConfigError(std::move(errs));
  }
  return validate(p);
}

void write_params(std::ostream& out, const PhysicalParams& params) {
  PhysicalParams copy = params;
  for (const auto& key : param_keys())
    out << key.name << " = " << format_double(*field(copy, key.name)) << "  # " << key.unit << '\n';
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace tbq
