#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wire/bits.hpp"
#include "wire/config.hpp"
#include "wire/core.hpp"
#include "wire/error.hpp"
#include "wire/mfv.hpp"
#include "wire/wearlevel.hpp"

namespace wire {

enum class SchemeId { plain, diffwrite, fnw, wire };

inline std::string_view to_string(SchemeId id) {
  switch (id) {
    case SchemeId::plain: return "plain";
    case SchemeId::diffwrite: return "diffwrite";
    case SchemeId::fnw: return "fnw";
    case SchemeId::wire: return "wire";
  }
  return "?";
}

inline SchemeId parse_scheme(std::string_view name) {
  if (name == "plain") return SchemeId::plain;
  if (name == "diffwrite") return SchemeId::diffwrite;
  if (name == "fnw") return SchemeId::fnw;
  if (name == "wire") return SchemeId::wire;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

struct ReadOutcome {
  std::vector<std::uint8_t> data;
  std::uint64_t meta_extra_reads = 0;
};

/// One encoding policy. `addr` is the physical block index; it only matters
/// for schemes that keep metadata in the controller cache.
class WriteScheme {
 public:
  virtual ~WriteScheme() = default;

  virtual SchemeId id() const = 0;
  virtual WriteOutcome write(PcmBlock& block, std::size_t addr, std::span<const std::uint8_t> data) = 0;
  virtual ReadOutcome read(const PcmBlock& block, std::size_t addr) = 0;
  /// Metadata bits stored per block.
  virtual std::size_t overhead_bits() const = 0;
};

// -- free-standing write paths ------------------------------------------------

inline WriteOutcome plain_write(PcmBlock& block, std::span<const std::uint8_t> data, const PcmConfig& cfg,
                                std::size_t addr = 0) {
  return force_program_cells(block, bytes_to_cells(data), cfg, addr);
}

inline WriteOutcome diff_write(PcmBlock& block, std::span<const std::uint8_t> data, const PcmConfig& cfg,
                               std::size_t addr = 0) {
  return program_cells(block, bytes_to_cells(data), cfg, addr);
}

struct FnwChoice {
  std::uint8_t flip = 0;
  std::size_t data_flips = 0;
  std::size_t flip_bit_flips = 0;

  std::size_t total() const { return data_flips + flip_bit_flips; }
};

/// Picks the cheaper of storing `data` or its complement over `physical`.
/// Ties keep the current flip bit.
inline FnwChoice fnw_choose(Cells physical, Cells data, std::uint8_t current_flip) {
  const std::size_t n = data.size();
  std::size_t keep = 0;
  for (std::size_t j = 0; j < n; ++j) keep += (physical[j] != (data[j] ^ current_flip));
  const std::size_t flip_cost = n - keep + 1;
  if (flip_cost < keep) return {static_cast<std::uint8_t>(current_flip ^ 1u), n - keep, 1};
  return {current_flip, keep, 0};
}

inline WriteOutcome fnw_write(PcmBlock& block, std::span<const std::uint8_t> data, const PcmConfig& cfg,
                              std::size_t word_bits, std::size_t addr = 0) {
  if (block.failed) throw DeadBlockError(addr);
  const CellArray logical = bytes_to_cells(data);
  const std::size_t words = logical.size() / word_bits;
  BlockMeta next = block.meta;
  next.flip_bits.resize(words, 0);
  CellArray phys(logical.size());
  const Cells stored(block.bits);
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t off = w * word_bits;
    const std::uint8_t cur = w < block.meta.flip_bits.size() ? block.meta.flip_bits[w] : 0;
    const auto choice = fnw_choose(stored.subspan(off, word_bits), Cells(logical).subspan(off, word_bits), cur);
    next.flip_bits[w] = choice.flip;
    for (std::size_t j = off; j < off + word_bits; ++j) phys[j] = logical[j] ^ choice.flip;
  }
  WriteOutcome out = program_cells(block, phys, cfg, addr);
  out += program_meta(block, next, cfg);
  return out;
}

inline std::vector<std::uint8_t> fnw_read(const PcmBlock& block, std::size_t word_bits) {
  CellArray logical = block.bits;
  for (std::size_t j = 0; j < logical.size(); ++j) {
    const std::size_t w = j / word_bits;
    if (w < block.meta.flip_bits.size()) logical[j] ^= block.meta.flip_bits[w];
  }
  return cells_to_bytes(logical);
}

struct RotationChoice {
  std::size_t rotation = 0;
  std::size_t distance = 0;
};

/// Exhaustive search over r in [0, rotation_max] for the rotation of
/// `encoded` closest to `stored`. Ties prefer `current`, then smaller r.
inline RotationChoice best_rotation(Cells encoded, Cells stored, std::size_t current, std::size_t rotation_max) {
  if (current > rotation_max) current = 0;
  RotationChoice best{current, hamming_rotated(encoded, stored, current)};
  for (std::size_t r = 0; r <= rotation_max && best.distance > 0; ++r) {
    if (r == current) continue;
    const std::size_t d = hamming_rotated(encoded, stored, r);
    if (d < best.distance) best = {r, d};
  }
  return best;
}

// -- scheme objects -----------------------------------------------------------

class PlainScheme final : public WriteScheme {
 public:
  explicit PlainScheme(const PcmConfig& cfg) : cfg_(cfg) {}
  SchemeId id() const override { return SchemeId::plain; }
  WriteOutcome write(PcmBlock& b, std::size_t addr, std::span<const std::uint8_t> d) override {
    return plain_write(b, d, cfg_, addr);
  }
  ReadOutcome read(const PcmBlock& b, std::size_t) override { return {cells_to_bytes(b.bits), 0}; }
  std::size_t overhead_bits() const override { return 0; }

 private:
  PcmConfig cfg_;
};

class DiffScheme final : public WriteScheme {
 public:
  explicit DiffScheme(const PcmConfig& cfg) : cfg_(cfg) {}
  SchemeId id() const override { return SchemeId::diffwrite; }
  WriteOutcome write(PcmBlock& b, std::size_t addr, std::span<const std::uint8_t> d) override {
    return diff_write(b, d, cfg_, addr);
  }
  ReadOutcome read(const PcmBlock& b, std::size_t) override { return {cells_to_bytes(b.bits), 0}; }
  std::size_t overhead_bits() const override { return 0; }

 private:
  PcmConfig cfg_;
};

class FnwScheme final : public WriteScheme {
 public:
  FnwScheme(const PcmConfig& cfg, const FnwConfig& fnw) : cfg_(cfg), word_bits_(fnw.word_bits) {
    fnw.validate(cfg);
  }
  SchemeId id() const override { return SchemeId::fnw; }
  WriteOutcome write(PcmBlock& b, std::size_t addr, std::span<const std::uint8_t> d) override {
    return fnw_write(b, d, cfg_, word_bits_, addr);
  }
  ReadOutcome read(const PcmBlock& b, std::size_t) override { return {fnw_read(b, word_bits_), 0}; }
  std::size_t overhead_bits() const override { return cfg_.block_bits() / word_bits_; }

 private:
  PcmConfig cfg_;
  std::size_t word_bits_;
};

/// Frequent-value codebook encoding with per-partition rotation.
class WireScheme final : public WriteScheme {
 public:
  explicit WireScheme(const SimConfig& cfg)
      : pcm_(cfg.pcm),
        mfv_(cfg.mfv),
        wear_(cfg.wear),
        finder_(cfg.mfv),
        identity_(std::make_shared<const Codebook>(Codebook::identity(cfg.pcm.granule_bits))),
        codebook_(identity_),
        cache_(MetadataCache::capacity_for(cfg.pcm)) {
    cfg.validate();
  }

  SchemeId id() const override { return SchemeId::wire; }

  /// Fixes the codebook and stops adapting it to observed values.
  void pin_codebook(Codebook cb) {
    if (cb.granule_bits() != pcm_.granule_bits) throw ConfigError("codebook granule width mismatch");
    codebook_ = std::make_shared<const Codebook>(std::move(cb));
    adaptive_ = false;
  }

  WriteOutcome write(PcmBlock& block, std::size_t addr, std::span<const std::uint8_t> data) override {
    if (block.failed) throw DeadBlockError(addr);
    const unsigned g = pcm_.granule_bits;
    const std::size_t nbits = pcm_.block_bits();
    const std::size_t p = pcm_.partition_bits();

    WriteOutcome out;
    out.meta_extra_reads += touch(addr);

    const CellArray logical = bytes_to_cells(data);
    values_.resize(pcm_.granules_per_block());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      values_[i] = granule_at(logical, i, g);
      finder_.observe(values_[i]);
    }
    if (adaptive_ && ++writes_since_check_ >= mfv_.rebuild_interval) {
      writes_since_check_ = 0;
      maybe_rebuild();
    }

    BlockMeta next = block.meta;
    next.epoch = next_write_epoch(block, wear_, g);

    encoded_.assign(nbits, 0);
    for (std::size_t i = 0; i < values_.size(); ++i)
      set_granule(encoded_, i, g, epoch_transform(codebook_->encode(values_[i]), next.epoch, g));

    physical_.assign(nbits, 0);
    for (std::size_t part = 0; part < pcm_.partitions_per_block; ++part) {
      const Cells enc = Cells(encoded_).subspan(part * p, p);
      const Cells stored = Cells(block.bits).subspan(part * p, p);
      const auto choice = best_rotation(enc, stored, block.meta.rot_counters[part], pcm_.rotation_max);
      rotate_right_into(enc, std::span<std::uint8_t>(physical_).subspan(part * p, p), choice.rotation);
      next.rot_counters[part] = static_cast<std::uint16_t>(choice.rotation);
    }

    out += program_cells(block, physical_, pcm_, addr);
    out += program_meta(block, next, pcm_);
    block.codebook = codebook_;
    update_references(block);
    return out;
  }

  ReadOutcome read(const PcmBlock& block, std::size_t addr) override {
    ReadOutcome out;
    out.meta_extra_reads = touch(addr);
    out.data = decode_block(block);
    return out;
  }

  /// Logical bytes held by `block`, without touching the metadata cache.
  std::vector<std::uint8_t> decode_block(const PcmBlock& block) const {
    const unsigned g = pcm_.granule_bits;
    const std::size_t p = pcm_.partition_bits();
    CellArray encoded(pcm_.block_bits());
    for (std::size_t part = 0; part < pcm_.partitions_per_block; ++part)
      rotate_left_into(Cells(block.bits).subspan(part * p, p),
                       std::span<std::uint8_t>(encoded).subspan(part * p, p), block.meta.rot_counters[part]);
    const Codebook& cb = block.codebook ? *block.codebook : *identity_;
    CellArray logical(encoded.size());
    for (std::size_t i = 0; i < pcm_.granules_per_block(); ++i) {
      const auto c = epoch_inverse(granule_at(encoded, i, g), block.meta.epoch, g);
      set_granule(logical, i, g, cb.decode(c));
    }
    return cells_to_bytes(logical);
  }

  std::size_t overhead_bits() const override {
    return pcm_.counter_bits_per_block() + (wear_.enabled ? epoch_tag_bits(pcm_.granule_bits) : 0);
  }

  const MfvFinder& finder() const { return finder_; }
  const Codebook& codebook() const { return *codebook_; }
  std::shared_ptr<const Codebook> codebook_ptr() const { return codebook_; }
  const MetadataCache& metadata_cache() const { return cache_; }
  std::uint64_t codebook_versions() const { return versions_; }

 private:
  std::uint64_t touch(std::size_t addr) { return cache_.touch(addr) == CacheAccess::miss ? 1 : 0; }

  void maybe_rebuild() {
    const auto ranked = finder_.table().ranked(mfv_.codebook_mfvs);
    const auto current = codebook_->ranked();
    if (std::equal(ranked.begin(), ranked.end(), current.begin(), current.end())) return;
    codebook_ = std::make_shared<const Codebook>(Codebook::build(ranked, pcm_.granule_bits));
    ++versions_;
  }

  void update_references(PcmBlock& block) {
    refs_.clear();
    for (auto v : values_)
      if (finder_.table().contains(v) && std::find(refs_.begin(), refs_.end(), v) == refs_.end())
        refs_.push_back(v);
    auto& table = finder_.table();
    for (auto v : refs_) table.add_reference(v);
    for (auto v : block.mfv_refs) table.retire_reference(v);
    block.mfv_refs = refs_;
  }

  PcmConfig pcm_;
  MfvConfig mfv_;
  WearConfig wear_;
  MfvFinder finder_;
  std::shared_ptr<const Codebook> identity_;
  std::shared_ptr<const Codebook> codebook_;
  MetadataCache cache_;
  bool adaptive_ = true;
  std::uint64_t writes_since_check_ = 0;
  std::uint64_t versions_ = 0;

  // scratch buffers reused across writes
  std::vector<std::uint32_t> values_;
  std::vector<std::uint32_t> refs_;
  CellArray encoded_;
  CellArray physical_;
};

inline std::unique_ptr<WriteScheme> make_scheme(SchemeId id, const SimConfig& cfg) {
  switch (id) {
    case SchemeId::plain: return std::make_unique<PlainScheme>(cfg.pcm);
    case SchemeId::diffwrite: return std::make_unique<DiffScheme>(cfg.pcm);
    case SchemeId::fnw: return std::make_unique<FnwScheme>(cfg.pcm, cfg.fnw);
    case SchemeId::wire: return std::make_unique<WireScheme>(cfg);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace wire
