#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wire/config.hpp"
#include "wire/core.hpp"
#include "wire/error.hpp"
#include "wire/metrics.hpp"
#include "wire/schemes.hpp"
#include "wire/trace.hpp"
#include "wire/wearlevel.hpp"

namespace wire {

/// One PCM array driven by one scheme. Logical block addresses go through
/// start-gap remapping when wear leveling is enabled; the array then holds
/// one spare physical block.
class Simulator {
 public:
  Simulator(const SimConfig& cfg, std::unique_ptr<WriteScheme> scheme)
      : cfg_(cfg), scheme_(std::move(scheme)) {
    cfg_.validate();
    if (cfg_.wear.enabled) remap_.emplace(cfg_.memory_blocks);
    blocks_.assign(cfg_.memory_blocks + (remap_ ? 1 : 0), PcmBlock(cfg_.pcm));
  }

  Simulator(const SimConfig& cfg, SchemeId id) : Simulator(cfg, make_scheme(id, cfg)) {}

  std::size_t logical_blocks() const { return cfg_.memory_blocks; }
  std::size_t physical_of(std::size_t logical) const {
    return remap_ ? remap_->to_physical(logical) : logical;
  }

  bool is_dead(std::size_t logical) const { return blocks_[physical_of(logical)].failed; }

  /// Services a write. Throws DeadBlockError when the target block has failed.
  WriteOutcome write(std::size_t logical, std::span<const std::uint8_t> payload) {
    check_address(logical);
    if (payload.size() != cfg_.pcm.block_bytes) throw Error("payload size does not match block_bytes");
    const std::size_t pa = physical_of(logical);
    WriteOutcome out = scheme_->write(blocks_[pa], pa, payload);
    ++writes_;
    totals_ += out;
    if (blocks_[pa].failed) capacity_dirty_ = any_failed_ = true;
    if (remap_ && writes_ % cfg_.wear.remap_period == 0) out += remap_step();
    return out;
  }

  ReadOutcome read(std::size_t logical) {
    check_address(logical);
    const std::size_t pa = physical_of(logical);
    ReadOutcome out = scheme_->read(blocks_[pa], pa);
    ++reads_;
    totals_.meta_extra_reads += out.meta_extra_reads;
    return out;
  }

  /// Live logical pages over all logical pages.
  double capacity() const {
    if (capacity_dirty_) {
      capacity_ = capacity_ratio(cfg_.memory_blocks, cfg_.pcm.blocks_per_page(),
                                 [this](std::size_t la) { return blocks_[physical_of(la)].failed; });
      capacity_dirty_ = false;
    }
    return capacity_;
  }

  WearMatrix wear() const { return WearMatrix::from_blocks(blocks_); }

  const WriteOutcome& totals() const { return totals_; }
  std::uint64_t writes() const { return writes_; }
  std::uint64_t reads() const { return reads_; }
  std::uint64_t remap_steps() const { return remap_steps_; }
  const SimConfig& config() const { return cfg_; }
  WriteScheme& scheme() { return *scheme_; }
  const WriteScheme& scheme() const { return *scheme_; }
  std::span<const PcmBlock> blocks() const { return blocks_; }
  const std::optional<StartGap>& remapper() const { return remap_; }

 private:
  void check_address(std::size_t logical) const {
    if (logical >= cfg_.memory_blocks)
      throw Error("block address " + std::to_string(logical) + " outside memory of " +
                  std::to_string(cfg_.memory_blocks) + " blocks");
  }

  // Copies the slot next to the gap into the gap: every destination cell is
  // programmed and the block's metadata moves with it.
  WriteOutcome remap_step() {
    const auto [src, dst] = remap_->step();
    ++remap_steps_;
    PcmBlock& from = blocks_[src];
    PcmBlock& to = blocks_[dst];
    WriteOutcome out;
    if (!to.failed) {
      out += force_program_cells(to, from.bits, cfg_.pcm, dst);
      out += program_meta(to, from.meta, cfg_.pcm);
    } else {
      to.bits = from.bits;
      to.meta = from.meta;
    }
    to.writes_since_epoch = from.writes_since_epoch;
    to.codebook = std::move(from.codebook);
    to.mfv_refs = std::move(from.mfv_refs);
    from.codebook.reset();
    from.mfv_refs.clear();
    totals_ += out;
    // The mapping moved, so failed blocks may now sit in different pages.
    if (to.failed || from.failed || any_failed_) capacity_dirty_ = true;
    any_failed_ = any_failed_ || to.failed;
    return out;
  }

  SimConfig cfg_;
  std::unique_ptr<WriteScheme> scheme_;
  std::optional<StartGap> remap_;
  std::vector<PcmBlock> blocks_;
  WriteOutcome totals_;
  std::uint64_t writes_ = 0;
  std::uint64_t reads_ = 0;
  std::uint64_t remap_steps_ = 0;
  bool any_failed_ = false;
  mutable bool capacity_dirty_ = false;
  mutable double capacity_ = 1.0;
};

struct LifetimeResult {
  std::uint64_t writes = 0;   // trace writes replayed until capacity fell below half
  double seconds = 0.0;
  bool cap_reached = false;
  std::uint64_t dropped_writes = 0;  // writes that targeted an already failed block
};

/// Replays the trace cyclically until fewer than half of the pages are live
/// or `max_writes` trace writes have been issued. Writes to failed blocks are
/// dropped but still count as issued; reads are serviced normally.
inline LifetimeResult run_lifetime(Simulator& sim, std::span<const TraceEvent> trace,
                                   std::uint64_t max_writes = 100'000'000) {
  const bool has_write = std::any_of(trace.begin(), trace.end(), [](const TraceEvent& e) { return e.op == Op::write; });
  if (trace.empty() || !has_write) throw Error("trace cannot wear memory");
  LifetimeResult res;
  const double latency = sim.config().pcm.write_latency_ns;
  while (true) {
    for (const auto& ev : trace) {
      if (ev.op == Op::read) {
        sim.read(ev.addr);
        continue;
      }
      if (res.writes >= max_writes) {
        res.cap_reached = true;
        res.seconds = lifetime_seconds(res.writes, latency);
        return res;
      }
      ++res.writes;
      if (sim.is_dead(ev.addr)) {
        ++res.dropped_writes;
        continue;
      }
      sim.write(ev.addr, ev.payload);
      if (sim.capacity() < 0.5) {
        res.seconds = lifetime_seconds(res.writes, latency);
        return res;
      }
    }
  }
}

}  // namespace wire
