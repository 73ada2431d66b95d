#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "wire/bits.hpp"
#include "wire/config.hpp"
#include "wire/error.hpp"

namespace wire {

class Codebook;

/// Cell programs caused by one operation, split by direction.
struct WriteOutcome {
  std::uint64_t flips_set = 0;    // 0 -> 1 data-cell programs
  std::uint64_t flips_reset = 0;  // 1 -> 0 data-cell programs
  std::uint64_t meta_set = 0;
  std::uint64_t meta_reset = 0;
  std::uint64_t meta_extra_reads = 0;

  std::uint64_t data_flips() const { return flips_set + flips_reset; }
  std::uint64_t meta_flips() const { return meta_set + meta_reset; }

  double data_energy_pj(const PcmConfig& cfg) const {
    return static_cast<double>(flips_set) * cfg.e_set + static_cast<double>(flips_reset) * cfg.e_reset;
  }

  double energy_pj(const PcmConfig& cfg) const {
    double e = data_energy_pj(cfg);
    if (cfg.count_metadata_flips)
      e += static_cast<double>(meta_set) * cfg.e_set + static_cast<double>(meta_reset) * cfg.e_reset;
    return e;
  }

  WriteOutcome& operator+=(const WriteOutcome& o) {
    flips_set += o.flips_set;
    flips_reset += o.flips_reset;
    meta_set += o.meta_set;
    meta_reset += o.meta_reset;
    meta_extra_reads += o.meta_extra_reads;
    return *this;
  }

  friend bool operator==(const WriteOutcome&, const WriteOutcome&) = default;
};

/// Per-block metadata kept outside the data cells: rotation counters,
/// the codeword epoch tag and Flip-N-Write flip bits.
struct BlockMeta {
  std::vector<std::uint16_t> rot_counters;
  std::uint8_t epoch = 0;
  std::vector<std::uint8_t> flip_bits;

  friend bool operator==(const BlockMeta&, const BlockMeta&) = default;
};

struct PcmBlock {
  CellArray bits;
  std::vector<std::uint32_t> cell_writes;
  BlockMeta meta;
  bool failed = false;

  // Shadow region: programs absorbed by metadata cells.
  std::uint64_t meta_writes = 0;
  // Writes absorbed since the last epoch bump.
  std::uint64_t writes_since_epoch = 0;
  // Codebook the stored image was encoded with; null means identity.
  std::shared_ptr<const Codebook> codebook;
  // Frequent values this block holds references to.
  std::vector<std::uint32_t> mfv_refs;

  PcmBlock() = default;
  explicit PcmBlock(const PcmConfig& cfg)
      : bits(cfg.block_bits(), 0), cell_writes(cfg.block_bits(), 0) {
    meta.rot_counters.assign(cfg.partitions_per_block, 0);
  }

  std::uint64_t total_cell_writes() const {
    std::uint64_t s = 0;
    for (auto w : cell_writes) s += w;
    return s;
  }
};

namespace detail {

inline void count_program(std::uint8_t target, WriteOutcome& out) {
  if (target) ++out.flips_set;
  else ++out.flips_reset;
}

inline void mark_if_worn(PcmBlock& block, std::size_t cell, const PcmConfig& cfg) {
  if (block.cell_writes[cell] > cfg.cell_endurance) block.failed = true;
}

inline void count_field_transitions(std::uint32_t before, std::uint32_t after, unsigned width,
                                    WriteOutcome& out) {
  const std::uint32_t m = width_mask(width);
  before &= m;
  after &= m;
  out.meta_set += popcount32(~before & after & m);
  out.meta_reset += popcount32(before & ~after & m);
}

}  // namespace detail

/// Differential programming: cells selected by `mask` whose stored state
/// differs from `new_bits` are programmed, everything else is left alone.
inline WriteOutcome program_cells(PcmBlock& block, Cells new_bits, Cells mask, const PcmConfig& cfg,
                                  std::size_t block_index = 0) {
  if (block.failed) throw DeadBlockError(block_index);
  assert(new_bits.size() == block.bits.size() && mask.size() == block.bits.size());
  WriteOutcome out;
  for (std::size_t j = 0; j < new_bits.size(); ++j) {
    if (!mask[j] || block.bits[j] == new_bits[j]) continue;
    block.bits[j] = new_bits[j];
    ++block.cell_writes[j];
    detail::count_program(new_bits[j], out);
    detail::mark_if_worn(block, j, cfg);
  }
  return out;
}

inline WriteOutcome program_cells(PcmBlock& block, Cells new_bits, const PcmConfig& cfg,
                                  std::size_t block_index = 0) {
  if (block.failed) throw DeadBlockError(block_index);
  assert(new_bits.size() == block.bits.size());
  WriteOutcome out;
  for (std::size_t j = 0; j < new_bits.size(); ++j) {
    if (block.bits[j] == new_bits[j]) continue;
    block.bits[j] = new_bits[j];
    ++block.cell_writes[j];
    detail::count_program(new_bits[j], out);
    detail::mark_if_worn(block, j, cfg);
  }
  return out;
}

/// Programs every cell regardless of its stored state. Programs toward 1
/// are charged as SET and programs toward 0 as RESET.
inline WriteOutcome force_program_cells(PcmBlock& block, Cells new_bits, const PcmConfig& cfg,
                                        std::size_t block_index = 0) {
  if (block.failed) throw DeadBlockError(block_index);
  assert(new_bits.size() == block.bits.size());
  WriteOutcome out;
  for (std::size_t j = 0; j < new_bits.size(); ++j) {
    block.bits[j] = new_bits[j];
    ++block.cell_writes[j];
    detail::count_program(new_bits[j], out);
    detail::mark_if_worn(block, j, cfg);
  }
  return out;
}

/// Bits of the epoch tag for granule width g: ceil(log2 g).
inline unsigned epoch_tag_bits(unsigned g) {
  unsigned bits = 0;
  while ((1u << bits) < g) ++bits;
  return bits;
}

/// Replaces the block's metadata with `next`, charging each changed
/// metadata bit to the shadow region.
inline WriteOutcome program_meta(PcmBlock& block, const BlockMeta& next, const PcmConfig& cfg) {
  WriteOutcome out;
  const auto& cur = block.meta;
  assert(cur.rot_counters.size() == next.rot_counters.size());
  for (std::size_t i = 0; i < next.rot_counters.size(); ++i)
    detail::count_field_transitions(cur.rot_counters[i], next.rot_counters[i], cfg.counter_bits, out);
  detail::count_field_transitions(cur.epoch, next.epoch, epoch_tag_bits(cfg.granule_bits), out);
  const std::size_t nflip = std::max(cur.flip_bits.size(), next.flip_bits.size());
  for (std::size_t i = 0; i < nflip; ++i) {
    const std::uint32_t a = i < cur.flip_bits.size() ? cur.flip_bits[i] : 0;
    const std::uint32_t b = i < next.flip_bits.size() ? next.flip_bits[i] : 0;
    detail::count_field_transitions(a, b, 1, out);
  }
  block.meta_writes += out.meta_flips();
  block.meta = next;
  return out;
}

enum class CacheAccess { hit, miss };

/// LRU cache of per-block metadata lines held in the memory controller.
class MetadataCache {
 public:
  MetadataCache() = default;

  explicit MetadataCache(std::size_t capacity_blocks) : capacity_(capacity_blocks) {}

  /// Blocks whose counters fit in the cache: bytes / ceil(counter bits / 8).
  static std::size_t capacity_for(const PcmConfig& cfg) {
    const std::size_t line = (cfg.counter_bits_per_block() + 7) / 8;
    return line == 0 ? 0 : cfg.metadata_cache_bytes / line;
  }

  CacheAccess touch(std::uint64_t block_addr) {
    if (capacity_ == 0) {
      ++misses_;
      return CacheAccess::miss;
    }
    if (auto it = index_.find(block_addr); it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      ++hits_;
      return CacheAccess::hit;
    }
    ++misses_;
    if (order_.size() == capacity_) {
      index_.erase(order_.back());
      order_.pop_back();
    }
    order_.push_front(block_addr);
    index_.emplace(block_addr, order_.begin());
    return CacheAccess::miss;
  }

  bool contains(std::uint64_t block_addr) const { return index_.count(block_addr) != 0; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return order_.size(); }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::size_t capacity_ = 0;
  std::list<std::uint64_t> order_;  // most recent first
  std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// Fraction of pages with no failed block. `block_failed(i)` reports block
/// i; a trailing partial page still counts as one page.
template <class FailedFn>
double capacity_ratio(std::size_t num_blocks, std::size_t blocks_per_page, FailedFn&& block_failed) {
  assert(blocks_per_page > 0);
  if (num_blocks == 0) return 1.0;
  const std::size_t pages = (num_blocks + blocks_per_page - 1) / blocks_per_page;
  std::size_t live = 0;
  for (std::size_t p = 0; p < pages; ++p) {
    bool dead = false;
    const std::size_t end = std::min(num_blocks, (p + 1) * blocks_per_page);
    for (std::size_t b = p * blocks_per_page; b < end && !dead; ++b) dead = block_failed(b);
    live += !dead;
  }
  return static_cast<double>(live) / static_cast<double>(pages);
}

inline double capacity_ratio(std::span<const PcmBlock> blocks, std::size_t blocks_per_page) {
  return capacity_ratio(blocks.size(), blocks_per_page, [&](std::size_t i) { return blocks[i].failed; });
}

}  // namespace wire
