#include "tbq/event_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tbq::io {

namespace {

constexpr char kMagic[8] = {'T', 'B', 'Q', 'E', 'V', 'T', '0', '1'};
constexpr const char* kCsvHeader = "trajectory_id,timestamp_ps,energy_uev,origin,phase_rad,bin_index";

template <class T>
T parse_number(std::string_view s, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("events csv line " + std::to_string(line) + ": bad number '" +
                             std::string(s) + "'");
  return v;
}

void put_u64(unsigned char* dst, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<unsigned char>(v >> (8 * i));
}
std::uint64_t get_u64(const unsigned char* src) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  return v;
}
void put_f64(unsigned char* dst, double v) { put_u64(dst, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const unsigned char* src) { return std::bit_cast<double>(get_u64(src)); }

}  // namespace

void write_events_csv(std::ostream& out, const std::vector<PhotonEvent>& events) {
  out << kCsvHeader << '\n';
  for (const auto& e : events)
    out << e.trajectory_id << ',' << format_double(e.timestamp_ps) << ',' << format_double(e.energy_uev)
        << ',' << to_string(e.origin) << ',' << format_double(e.phase_rad) << ',' << e.bin_index << '\n';
}

std::vector<PhotonEvent> read_events_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("events csv: missing or unexpected header");
  std::vector<PhotonEvent> events;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string_view, 6> cols;
    std::string_view rest(line);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i + 1 == cols.size()))
        throw std::runtime_error("events csv line " + std::to_string(lineno) + ": expected 6 columns");
      cols[i] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    events.push_back({parse_number<std::uint64_t>(cols[0], lineno), parse_number<double>(cols[1], lineno),
                      parse_number<double>(cols[2], lineno), origin_from_string(cols[3]),
                      parse_number<double>(cols[4], lineno), parse_number<int>(cols[5], lineno)});
  }
  return events;
}

void write_events_binary(std::ostream& out, const std::vector<PhotonEvent>& events) {
  unsigned char header[16];
  std::memcpy(header, kMagic, 8);
  put_u64(header + 8, events.size());
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::array<unsigned char, kBinaryRecordSize> rec{};
  for (const auto& e : events) {
    rec.fill(0);
    put_u64(rec.data(), e.trajectory_id);
    put_f64(rec.data() + 8, e.timestamp_ps);
    put_f64(rec.data() + 16, e.energy_uev);
    put_f64(rec.data() + 24, e.phase_rad);
    const auto bin = static_cast<std::uint32_t>(e.bin_index);
    for (int i = 0; i < 4; ++i) rec[32 + i] = static_cast<unsigned char>(bin >> (8 * i));
    rec[36] = static_cast<unsigned char>(e.origin);
    out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
  }
}

std::vector<PhotonEvent> read_events_binary(std::istream& in) {
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header)) || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error("events binary: bad magic");
  const std::uint64_t n = get_u64(header + 8);
  std::vector<PhotonEvent> events;
  events.reserve(static_cast<std::size_t>(n));
  std::array<unsigned char, kBinaryRecordSize> rec{};
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(rec.data()), rec.size()))
      throw std::runtime_error("events binary: truncated at record " + std::to_string(i));
    std::uint32_t bin = 0;
    for (int b = 0; b < 4; ++b) bin |= static_cast<std::uint32_t>(rec[32 + b]) << (8 * b);
    if (rec[36] > 3) throw std::runtime_error("events binary: bad origin code");
    events.push_back({get_u64(rec.data()), get_f64(rec.data() + 8), get_f64(rec.data() + 16),
                      static_cast<Origin>(rec[36]), get_f64(rec.data() + 24), static_cast<std::int32_t>(bin)});
  }
  return events;
}

}  // namespace tbq::io
