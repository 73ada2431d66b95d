#pragma once

// Line-oriented trace format:
//
//   # comment
//   W <addr-hex> <payload-hex>
//   R <addr-hex>
//
// plus a seeded synthetic generator with controllable read/write mix and
// granule-level value locality.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wire/bits.hpp"
#include "wire/error.hpp"

namespace wire {

enum class Op : char { read = 'R', write = 'W' };

struct TraceEvent {
  Op op = Op::read;
  std::uint64_t addr = 0;
  std::vector<std::uint8_t> payload;  // block_bytes bytes for writes, empty for reads

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

namespace detail {

inline int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline bool parse_hex_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty() || s.size() > 16) return false;
  out = 0;
  for (char c : s) {
    const int d = hex_digit(c);
    if (d < 0) return false;
    out = (out << 4) | static_cast<std::uint64_t>(d);
  }
  return true;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace detail

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

/// Parses a trace. `memory_blocks` of 0 skips the address bound check.
inline Trace parse_trace(std::istream& in, std::size_t block_bytes, std::size_t memory_blocks = 0) {
  Trace events;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;

    TraceEvent ev;
    if (tok[0] == "W") ev.op = Op::write;
    else if (tok[0] == "R") ev.op = Op::read;
    else throw TraceError(lineno, "unknown operation '" + std::string(tok[0]) + "'");

    const std::size_t want = ev.op == Op::write ? 3 : 2;
    if (tok.size() != want)
      throw TraceError(lineno, "expected " + std::to_string(want) + " fields, got " + std::to_string(tok.size()));
    if (!detail::parse_hex_u64(tok[1], ev.addr))
      throw TraceError(lineno, "bad block address '" + std::string(tok[1]) + "'");
    if (memory_blocks != 0 && ev.addr >= memory_blocks)
      throw TraceError(lineno, "block address " + std::string(tok[1]) + " outside memory of " +
                                   std::to_string(memory_blocks) + " blocks");

    if (ev.op == Op::write) {
      const auto hex = tok[2];
      if (hex.size() != block_bytes * 2)
        throw TraceError(lineno, "payload must be " + std::to_string(block_bytes) + " bytes, got " +
                                     std::to_string(hex.size() / 2) + (hex.size() % 2 ? ".5" : ""));
      ev.payload.resize(block_bytes);
      for (std::size_t i = 0; i < block_bytes; ++i) {
        const int hi = detail::hex_digit(hex[2 * i]);
        const int lo = detail::hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw TraceError(lineno, "payload is not hexadecimal");
        ev.payload[i] = static_cast<std::uint8_t>((hi << 4) | lo);
      }
    }
    events.push_back(std::move(ev));
  }
  return events;
}

inline void emit_trace(std::ostream& out, std::span<const TraceEvent> events) {
  static constexpr char digits[] = "0123456789abcdef";
  out << "# wire trace v1\n";
  for (const auto& ev : events) {
    std::string addr;
    for (std::uint64_t a = ev.addr; a != 0; a >>= 4) addr.insert(addr.begin(), digits[a & 0xF]);
    if (addr.size() < 4) addr.insert(0, 4 - addr.size(), '0');
    out << static_cast<char>(ev.op) << ' ' << addr;
    if (ev.op == Op::write) out << ' ' << to_hex(ev.payload);
    out << '\n';
  }
}

/// FNV-1a over the event stream; two schemes fed the same trace see the
/// same hash.
inline std::uint64_t trace_hash(std::span<const TraceEvent> events) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  for (const auto& ev : events) {
    mix(static_cast<std::uint8_t>(ev.op));
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(ev.addr >> (8 * i)));
    for (auto b : ev.payload) mix(b);
  }
  return h;
}

// -- generator ------------------------------------------------------------------

struct AddressModel {
  enum class Kind { uniform, zipf } kind = Kind::uniform;
  double zipf_s = 1.0;
};

/// Distribution of each granule of a write payload. `top` lists explicit
/// values with their probabilities; the remaining mass is spread uniformly
/// over the values not listed.
struct ValueModel {
  enum class Kind { categorical, zipf } kind = Kind::categorical;
  std::vector<std::pair<std::uint32_t, double>> top;
  double zipf_s = 1.0;
};

struct GenSpec {
  std::uint64_t events = 100000;
  double read_fraction = 0.5;
  std::size_t memory_blocks = 1024;
  std::size_t block_bytes = 64;
  unsigned granule_bits = 4;
  AddressModel address;
  ValueModel values;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) throw ConfigError("read_fraction must be in [0, 1]");
    if (memory_blocks == 0) throw ConfigError("memory_blocks must be positive");
    if (block_bytes == 0) throw ConfigError("block_bytes must be positive");
    if (granule_bits == 0 || granule_bits > 16 || (block_bytes * 8) % granule_bits != 0)
      throw ConfigError("granule_bits must be in [1, 16] and divide the block width");
    if (address.kind == AddressModel::Kind::zipf && !(address.zipf_s > 0.0))
      throw ConfigError("address zipf exponent must be positive");
    if (values.kind == ValueModel::Kind::zipf && !(values.zipf_s > 0.0))
      throw ConfigError("value zipf exponent must be positive");
    const std::uint32_t n = std::uint32_t{1} << granule_bits;
    double sum = 0.0;
    std::vector<bool> seen(n, false);
    for (const auto& [v, p] : values.top) {
      if (v >= n) throw ConfigError("value model entry " + std::to_string(v) + " exceeds granule width");
      if (seen[v]) throw ConfigError("value model lists " + std::to_string(v) + " twice");
      if (!(p >= 0.0)) throw ConfigError("value model probabilities must be non-negative");
      seen[v] = true;
      sum += p;
    }
    if (sum > 1.0 + 1e-9) throw ConfigError("value model probabilities sum above 1");
  }
};

/// Granule mix with frequent-value locality: all-zero granules, small
/// integers and all-one granules make up just over 80% of the traffic.
inline ValueModel default_value_model() {
  ValueModel m;
  m.top = {{0x0, 0.45}, {0x1, 0.15}, {0xF, 0.10}, {0x3, 0.07}, {0x7, 0.05}};
  return m;
}

/// Named read/write mixes: read-heavy, balanced, write-heavy.
inline GenSpec preset(std::string_view name) {
  GenSpec spec;
  spec.values = default_value_model();
  if (name == "read-heavy") spec.read_fraction = 0.75;
  else if (name == "balanced") spec.read_fraction = 0.5;
  else if (name == "write-heavy") spec.read_fraction = 0.25;
  else throw ConfigError("unknown preset '" + std::string(name) + "'");
  return spec;
}

namespace detail {

/// Inverse-CDF sampler over a finite support.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    cdf_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += w / total;
      cdf_.push_back(acc);
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
  }

  std::size_t operator()(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline std::vector<double> zipf_weights(std::size_t n, double s) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(static_cast<double>(k + 1), s);
  return w;
}

inline std::vector<double> granule_weights(const GenSpec& spec) {
  const std::size_t n = std::size_t{1} << spec.granule_bits;
  if (spec.values.kind == ValueModel::Kind::zipf) return zipf_weights(n, spec.values.zipf_s);
  std::vector<double> w(n, 0.0);
  std::vector<bool> listed(n, false);
  double sum = 0.0;
  for (const auto& [v, p] : spec.values.top) {
    w[v] = p;
    listed[v] = true;
    sum += p;
  }
  const double rest = std::max(0.0, 1.0 - sum);
  const auto unlisted = static_cast<std::size_t>(std::count(listed.begin(), listed.end(), false));
  if (rest > 0.0) {
    if (unlisted == 0) {
      for (auto& x : w) x += rest / static_cast<double>(n);
    } else {
      for (std::size_t v = 0; v < n; ++v)
        if (!listed[v]) w[v] = rest / static_cast<double>(unlisted);
    }
  }
  return w;
}

// 53 random bits mapped to [0, 1); independent of the standard library's
// distribution implementations so traces are identical across toolchains.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

inline Trace generate(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const detail::DiscreteSampler value_of(detail::granule_weights(spec));
  const bool zipf_addr = spec.address.kind == AddressModel::Kind::zipf;
  const detail::DiscreteSampler zipf_block(zipf_addr ? detail::zipf_weights(spec.memory_blocks, spec.address.zipf_s)
                                                     : std::vector<double>{1.0});
  const unsigned g = spec.granule_bits;
  const std::size_t granules = spec.block_bytes * 8 / g;

  Trace events;
  events.reserve(spec.events);
  CellArray cells(spec.block_bytes * 8);
  for (std::uint64_t e = 0; e < spec.events; ++e) {
    TraceEvent ev;
    ev.op = detail::uniform01(rng) < spec.read_fraction ? Op::read : Op::write;
    const double ua = detail::uniform01(rng);
    ev.addr = zipf_addr ? zipf_block(ua)
                        : std::min<std::uint64_t>(static_cast<std::uint64_t>(ua * static_cast<double>(spec.memory_blocks)),
                                                  spec.memory_blocks - 1);
    if (ev.op == Op::write) {
      for (std::size_t i = 0; i < granules; ++i)
        set_granule(cells, i, g, static_cast<std::uint32_t>(value_of(detail::uniform01(rng))));
      ev.payload = cells_to_bytes(cells);
    }
    events.push_back(std::move(ev));
  }
  return events;
}

}  // namespace wire
