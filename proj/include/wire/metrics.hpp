#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <ios>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wire/bits.hpp"
#include "wire/core.hpp"
#include "wire/error.hpp"
#include "wire/trace.hpp"

namespace wire {

/// Per-cell write counts: N blocks of C cells, row-major.
struct WearMatrix {
  std::size_t blocks = 0;
  std::size_t cells = 0;
  std::vector<std::uint64_t> counts;

  WearMatrix() = default;
  WearMatrix(std::size_t n, std::size_t c) : blocks(n), cells(c), counts(n * c, 0) {}

  std::uint64_t& at(std::size_t i, std::size_t j) { return counts[i * cells + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * cells + j]; }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }

  static WearMatrix from_blocks(std::span<const PcmBlock> blocks) {
    WearMatrix m(blocks.size(), blocks.empty() ? 0 : blocks.front().cell_writes.size());
    for (std::size_t i = 0; i < blocks.size(); ++i)
      std::copy(blocks[i].cell_writes.begin(), blocks[i].cell_writes.end(), m.counts.begin() + i * m.cells);
    return m;
  }
};

/// Intra-block wear variation: the per-block sample standard deviation of
/// cell write counts, averaged over blocks and normalised by the mean write
/// count of all cells. A matrix with no writes yields 0.
inline double intrav(const WearMatrix& w) {
  if (w.cells < 2) throw Error("intrav needs at least two cells per block");
  if (w.blocks == 0) return 0.0;
  const double c = static_cast<double>(w.cells);
  const double n = static_cast<double>(w.blocks);
  const double avg = static_cast<double>(w.total()) / (n * c);
  if (avg == 0.0) return 0.0;
  double sum_std = 0.0;
  for (std::size_t i = 0; i < w.blocks; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < w.cells; ++j) row += static_cast<double>(w.at(i, j));
    const double mean = row / c;
    double ss = 0.0;
    for (std::size_t j = 0; j < w.cells; ++j) {
      const double d = static_cast<double>(w.at(i, j)) - mean;
      ss += d * d;
    }
    sum_std += std::sqrt(ss / (c - 1.0));
  }
  return sum_std / (avg * n);
}

struct CoverageRow {
  std::uint32_t value = 0;
  std::uint64_t count = 0;
  double fraction = 0.0;
  double cumulative = 0.0;
};

/// Granule histogram over all write payloads, most frequent first (ties by
/// ascending value), with cumulative coverage.
inline std::vector<CoverageRow> mfv_coverage(std::span<const TraceEvent> events, unsigned g) {
  if (g != 1 && g != 2 && g != 4 && g != 8) throw ConfigError("coverage granularity must be 1, 2, 4 or 8");
  std::vector<std::uint64_t> hist(std::size_t{1} << g, 0);
  std::uint64_t total = 0;
  for (const auto& ev : events) {
    if (ev.op != Op::write) continue;
    for (auto byte : ev.payload)
      for (int pos = 8 - static_cast<int>(g); pos >= 0; pos -= static_cast<int>(g)) {
        ++hist[(byte >> pos) & width_mask(g)];
        ++total;
      }
  }
  if (total == 0) return {};
  std::vector<CoverageRow> rows;
  for (std::uint32_t v = 0; v < hist.size(); ++v) rows.push_back({v, hist[v], 0.0, 0.0});
  std::stable_sort(rows.begin(), rows.end(), [](const CoverageRow& a, const CoverageRow& b) { return a.count > b.count; });
  double acc = 0.0;
  for (auto& r : rows) {
    r.fraction = static_cast<double>(r.count) / static_cast<double>(total);
    acc += r.fraction;
    r.cumulative = acc;
  }
  rows.back().cumulative = 1.0;
  return rows;
}

/// Cumulative coverage of the k most frequent values (k >= 1).
inline double top_k_coverage(std::span<const CoverageRow> rows, std::size_t k) {
  if (rows.empty() || k == 0) return 0.0;
  return rows[std::min(k, rows.size()) - 1].cumulative;
}

struct RunReport {
  std::string scheme;
  std::uint64_t writes = 0;
  std::uint64_t reads = 0;
  std::uint64_t flips_set = 0;
  std::uint64_t flips_reset = 0;
  std::uint64_t flips_meta = 0;
  double energy_pj = 0.0;
  double data_energy_pj = 0.0;
  double intrav = 0.0;
  bool intrav_degenerate = false;  // no cell was ever programmed
  std::uint64_t lifetime_writes = 0;
  double lifetime_seconds = 0.0;
  bool lifetime_cap_reached = false;
  std::uint64_t meta_extra_reads = 0;
  double mfv_top[5] = {0, 0, 0, 0, 0};
  std::size_t overhead_bits = 0;
  std::size_t block_bits = 0;
  double capacity = 1.0;
  bool truncated = false;  // non-lifetime run halted on a dead block
  std::uint64_t dropped_writes = 0;
  std::uint64_t remap_steps = 0;
  std::uint64_t codebook_versions = 0;
  std::uint64_t trace_hash = 0;

  double overhead_ratio() const {
    return block_bits == 0 ? 0.0 : static_cast<double>(overhead_bits) / static_cast<double>(block_bits);
  }
};

inline double lifetime_seconds(std::uint64_t writes, double write_latency_ns) {
  return static_cast<double>(writes) * write_latency_ns * 1e-9;
}

inline std::string csv_header() {
  return "scheme,writes,reads,flips_set,flips_reset,flips_meta,energy_pj,intrav,lifetime_writes,"
         "lifetime_seconds,meta_extra_reads,mfv_top1,mfv_top2,mfv_top3,mfv_top4,mfv_top5,overhead_bits";
}

inline std::string csv_row(const RunReport& r) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << r.scheme << ',' << r.writes << ',' << r.reads << ',' << r.flips_set << ',' << r.flips_reset << ','
     << r.flips_meta << ',' << r.energy_pj << ',' << r.intrav << ',' << r.lifetime_writes << ','
     << r.lifetime_seconds << ',' << r.meta_extra_reads;
  for (double c : r.mfv_top) os << ',' << c;
  os << ',' << r.overhead_bits;
  return os.str();
}

}  // namespace wire
