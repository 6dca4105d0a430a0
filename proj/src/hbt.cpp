#include <algorithm>
#include <cmath>
#include <ostream>

#include "tbq/errors.hpp"
#include "tbq/measurement.hpp"

namespace tbq::measure {

namespace {

struct Group {
  std::uint64_t trajectory;
  std::size_t begin;
  std::size_t end;
};

}  // namespace

double G2Table::at(int lag) const {
  const auto it = std::find(lag_periods.begin(), lag_periods.end(), lag);
  if (it == lag_periods.end()) throw std::out_of_range("G2Table: lag outside window");
  return g2[static_cast<std::size_t>(it - lag_periods.begin())];
}

double G2Table::sigma_at(int lag) const {
  const auto it = std::find(lag_periods.begin(), lag_periods.end(), lag);
  if (it == lag_periods.end()) throw std::out_of_range("G2Table: lag outside window");
  return sigma[static_cast<std::size_t>(it - lag_periods.begin())];
}

double default_period(const EventStream& stream) {
  return WindowLayout(stream.params, stream.sequence.n_bins).length();
}

G2Table hbt_g2(const EventStream& stream, double period, int n_window, Exec exec) {
  if (!(period > 0.0)) throw ConfigError({"period must be positive"});
  if (n_window < 1) throw ConfigError({"n_periods_window must be at least 1"});

  const auto& ev = stream.events;
  std::vector<unsigned char> on_a(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i)
    on_a[i] = Substream(stream.seed, StreamTag::Detector, event_key(ev[i])).uniform() < 0.5;

  std::vector<Group> groups;
  for (std::size_t i = 0; i < ev.size();) {
    std::size_t j = i;
    while (j < ev.size() && ev[j].trajectory_id == ev[i].trajectory_id) ++j;
    groups.push_back({ev[i].trajectory_id, i, j});
    i = j;
  }

  const std::size_t n_lags = static_cast<std::size_t>(2 * n_window + 1);
  const auto reach = static_cast<std::uint64_t>(n_window + 1);
  const auto n_groups = static_cast<std::ptrdiff_t>(groups.size());
  const std::ptrdiff_t chunk = 1024;
  const std::ptrdiff_t n_chunks = (n_groups + chunk - 1) / chunk;
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(n_chunks),
                                                  std::vector<std::uint64_t>(n_lags, 0));

  // Start detector A at each group, look for detector B within +-reach repetitions.
  auto body = [&](std::ptrdiff_t c) {
    auto& counts = partial[static_cast<std::size_t>(c)];
    const std::ptrdiff_t g_end = std::min(n_groups, (c + 1) * chunk);
    for (std::ptrdiff_t g = c * chunk; g < g_end; ++g) {
      const Group& ga = groups[static_cast<std::size_t>(g)];
      std::ptrdiff_t lo = g;
      while (lo > 0 && ga.trajectory - groups[static_cast<std::size_t>(lo - 1)].trajectory <= reach) --lo;
      for (std::ptrdiff_t h = lo; h < n_groups; ++h) {
        const Group& gb = groups[static_cast<std::size_t>(h)];
        if (gb.trajectory > ga.trajectory + reach) break;
        const double offset = (static_cast<double>(gb.trajectory) - static_cast<double>(ga.trajectory)) * period;
        for (std::size_t a = ga.begin; a < ga.end; ++a) {
          if (!on_a[a]) continue;
          for (std::size_t b = gb.begin; b < gb.end; ++b) {
            if (on_a[b]) continue;
            const double lag = std::nearbyint((offset + ev[b].timestamp_ps - ev[a].timestamp_ps) / period);
            if (std::abs(lag) <= n_window) ++counts[static_cast<std::size_t>(lag + n_window)];
          }
        }
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < n_chunks; ++c) body(c);
  } else {
    for (std::ptrdiff_t c = 0; c < n_chunks; ++c) body(c);
  }

  G2Table t;
  t.coincidences.assign(n_lags, 0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < n_lags; ++k) t.coincidences[k] += p[k];

  // Coincidence rate per available pair of repetitions at each lag.
  const double n_rep = static_cast<double>(stream.n_trajectories);
  std::vector<double> rate(n_lags);
  double side_rate = 0.0;
  std::uint64_t side_counts = 0;
  for (int k = -n_window; k <= n_window; ++k) {
    const auto idx = static_cast<std::size_t>(k + n_window);
    const double pairs = std::max(1.0, n_rep - std::abs(k));
    rate[idx] = static_cast<double>(t.coincidences[idx]) / pairs;
    if (k != 0) {
      side_rate += rate[idx];
      side_counts += t.coincidences[idx];
    }
  }
  if (side_counts == 0)
    throw InsufficientStatistics("hbt_g2: no side-peak coincidences; increase trajectories or count rate");
  side_rate /= 2.0 * n_window;
  const double side_mean_counts = static_cast<double>(side_counts) / (2.0 * n_window);

  for (int k = -n_window; k <= n_window; ++k) {
    const auto idx = static_cast<std::size_t>(k + n_window);
    const double g = rate[idx] / side_rate;
    const double c = static_cast<double>(t.coincidences[idx]);
    t.lag_periods.push_back(k);
    t.g2.push_back(g);
    t.sigma.push_back(c > 0.0 ? g * std::sqrt(1.0 / c + 1.0 / static_cast<double>(side_counts))
                              : 1.0 / side_mean_counts);
  }
  return t;
}

void write_csv(std::ostream& out, const G2Table& t) {
  out << "lag_periods,g2\n";
  for (std::size_t i = 0; i < t.g2.size(); ++i) out << t.lag_periods[i] << ',' << format_double(t.g2[i]) << '\n';
}

}  // namespace tbq::measure
