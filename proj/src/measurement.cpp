#include "tbq/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "tbq/detail/parallel.hpp"
#include "tbq/dynamics.hpp"
#include "tbq/errors.hpp"

namespace tbq::measure {

std::uint64_t Histogram::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::uint64_t Histogram::sum_between(double begin, double end) const {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double centre = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
    if (centre >= begin && centre < end) n += counts[i];
  }
  return n;
}

PeakCounts peak_counts(const Histogram& h, const WindowLayout& lay) {
  return {h.sum_between(lay.window_begin(0), lay.window_end(0)),
          h.sum_between(lay.window_begin(1), lay.window_end(1)),
          h.sum_between(lay.window_begin(2), lay.window_end(2))};
}

EventStream gate(const EventStream& stream, double window_start, double window_end) {
  if (!(window_start < window_end)) throw ConfigError({"gate: window_start must precede window_end"});
  EventStream out{stream.params, stream.sequence, stream.seed, stream.n_trajectories, {}};
  std::copy_if(stream.events.begin(), stream.events.end(), std::back_inserter(out.events),
               [&](const PhotonEvent& e) {
                 return e.timestamp_ps >= window_start && e.timestamp_ps < window_end;
               });
  return out;
}

EventStream gate_default(const EventStream& stream) {
  const WindowLayout lay(stream.params, stream.sequence.n_bins);
  return gate(stream, lay.gate_begin(), lay.gate_end());
}

namespace {

// Grid from just below zero to `span`, aligned so every counting-window
// boundary falls on an edge.
Histogram empty_histogram(const EventStream& stream, const WindowLayout& lay, double res, double span) {
  const double origin = lay.window_begin(0) - std::ceil(lay.window_begin(0) / res) * res;
  const auto n_bins = static_cast<std::size_t>(std::ceil((span - origin) / res));
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = origin + static_cast<double>(i) * res;
  h.counts.assign(n_bins, 0);
  h.seed = stream.seed;
  h.n_trajectories = stream.n_trajectories;
  h.n_input_events = stream.events.size();
  return h;
}

void add(Histogram& h, double t) {
  const std::size_t n_bins = h.counts.size();
  if (t < h.bin_edges.front()) return;
  auto k = static_cast<std::size_t>((t - h.bin_edges.front()) / (h.bin_edges[1] - h.bin_edges[0]));
  if (k >= n_bins) return;
  // Guard against rounding at an edge.
  if (t < h.bin_edges[k] && k > 0) --k;
  else if (t >= h.bin_edges[k + 1] && k + 1 < n_bins) ++k;
  ++h.counts[k];
}

}  // namespace

Histogram michelson(const EventStream& stream, double interferometer_phase, const MichelsonOptions& opt) {
  std::set<int> occupied;
  for (const auto& e : stream.events)
    if (e.bin_index >= 0) occupied.insert(e.bin_index);
  if (occupied.size() > 2 || stream.sequence.n_bins != 2)
    throw ConfigError({"michelson: stream must occupy at most two time bins"});

  const WindowLayout lay(stream.params, 2);
  const double delay = lay.bin_separation();
  const double res = opt.resolution_ps > 0.0 ? opt.resolution_ps : delay / 30.0;
  Histogram h = empty_histogram(stream, lay, res, lay.length() + delay);

  const double v = dynamics::coherent_photon_visibility(stream.sequence, stream.params);
  const auto detected = detail::chunked_collect<double>(
      stream.events.size(), opt.exec, [&](std::size_t begin, std::size_t end, std::vector<double>& out) {
        for (std::size_t i = begin; i < end; ++i) {
          const PhotonEvent& e = stream.events[i];
          Substream rng(stream.seed, StreamTag::Interferometer, event_key(e), opt.salt);
          double p_short = 0.25;
          double p_long = 0.25;
          if (e.origin == Origin::CoherentRaman) {
            const double overlap = 0.25 * (1.0 + v * std::cos(e.phase_rad + interferometer_phase));
            (e.bin_index == 0 ? p_long : p_short) = overlap;
          }
          const double u = rng.uniform();
          if (u < p_short)
            out.push_back(e.timestamp_ps);
          else if (u < p_short + p_long)
            out.push_back(e.timestamp_ps + delay);
        }
      });
  for (double t : detected) add(h, t);
  return h;
}

Histogram time_histogram(const EventStream& stream, double resolution_ps) {
  if (!(resolution_ps > 0.0)) throw ConfigError({"resolution_ps: must be positive"});
  const WindowLayout lay(stream.params, stream.sequence.n_bins);
  Histogram h = empty_histogram(stream, lay, resolution_ps, lay.length());
  for (const auto& e : stream.events) add(h, e.timestamp_ps);
  return h;
}

PeakExpectation michelson_expectation(const TimeBinState& s, double interferometer_phase) {
  const std::complex<double> c = std::conj(s.coherence()) * std::polar(1.0, interferometer_phase);
  return {0.25 * s.p_early(), 0.25 * s.p_photon() + 0.5 * c.real(), 0.25 * s.p_late()};
}

namespace {

void require_scan_phases(const std::vector<double>& phases) {
  std::set<double> distinct;
  for (double p : phases) distinct.insert(std::remainder(p, 2.0 * std::numbers::pi));
  if (distinct.size() < 8)
    throw ConfigError({"phases: a fringe scan needs at least 8 distinct interferometer phases"});
}

}  // namespace

FringeScan fringe_scan(const EventStream& stream, const std::vector<double>& phases, Exec exec) {
  require_scan_phases(phases);
  const WindowLayout lay(stream.params, 2);
  FringeScan scan{phases, {}, {}};
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto peaks = peak_counts(michelson(stream, phases[i], {0.0, i + 1, exec}), lay);
    scan.middle_counts.push_back(peaks.middle);
    scan.side_counts.push_back(peaks.side());
  }
  return scan;
}

FringeScan fringe_scan(const PulseSequence& sequence, const PhysicalParams& params,
                       const std::vector<double>& phases, std::uint64_t trajectories_per_point,
                       std::uint64_t seed, Exec exec) {
  require_scan_phases(phases);
  const WindowLayout lay(params, 2);
  FringeScan scan{phases, {}, {}};
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto stream = gate_default(mc::run(sequence, params, trajectories_per_point,
                                             mix64(seed ^ mix64(i + 1)), exec));
    const auto peaks = peak_counts(michelson(stream, phases[i], {0.0, 0, exec}), lay);
    scan.middle_counts.push_back(peaks.middle);
    scan.side_counts.push_back(peaks.side());
  }
  return scan;
}

std::vector<double> phase_grid(int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(2.0 * std::numbers::pi * i / count);
  return out;
}

double lorentzian(double energy, double center, double fwhm) {
  const double x = (energy - center) / (0.5 * fwhm);
  return 1.0 / (1.0 + x * x);
}

EventStream spectral_filter(const EventStream& stream, double center, double fwhm, double extinction,
                            std::uint64_t salt, Exec exec) {
  std::vector<std::string> errs;
  if (!(fwhm > 0.0)) errs.push_back("filter fwhm must be positive");
  if (!(extinction >= 0.0 && extinction < 1.0)) errs.push_back("filter extinction must lie in [0, 1)");
  if (!errs.empty()) throw ConfigError(std::move(errs));

  EventStream out{stream.params, stream.sequence, stream.seed, stream.n_trajectories, {}};
  out.events = detail::chunked_collect<PhotonEvent>(
      stream.events.size(), exec, [&](std::size_t begin, std::size_t end, std::vector<PhotonEvent>& kept) {
        for (std::size_t i = begin; i < end; ++i) {
          const PhotonEvent& e = stream.events[i];
          const double t = std::max(lorentzian(e.energy_uev, center, fwhm), extinction);
          Substream rng(stream.seed, StreamTag::Filter, event_key(e), salt);
          if (rng.uniform() < t) kept.push_back(e);
        }
      });
  return out;
}

void write_csv(std::ostream& out, const Histogram& h) {
  out << "bin_start_ps,bin_end_ps,counts\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ',' << h.counts[i]
        << '\n';
}

void write_csv(std::ostream& out, const FringeScan& s) {
  out << "phase_rad,middle_counts,side_counts\n";
  for (std::size_t i = 0; i < s.phases.size(); ++i)
    out << format_double(s.phases[i]) << ',' << s.middle_counts[i] << ',' << s.side_counts[i] << '\n';
}

}  // namespace tbq::measure
