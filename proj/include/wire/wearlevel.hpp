#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "wire/bits.hpp"
#include "wire/config.hpp"
#include "wire/core.hpp"

namespace wire {

/// Rotates a g-bit codeword left by `epoch`, moving the single bit that
/// separates neighbouring codewords to a different cell each epoch.
inline std::uint32_t epoch_transform(std::uint32_t codeword, unsigned epoch, unsigned g) {
  return rotl_width(codeword, epoch, g);
}

inline std::uint32_t epoch_inverse(std::uint32_t codeword, unsigned epoch, unsigned g) {
  return rotr_width(codeword, epoch, g);
}

/// Epoch to use for the block's next write. Advances the block's write
/// counter and, once `epoch_writes` writes have landed since the last bump,
/// moves to the next epoch (mod g). The new tag reaches the metadata cells
/// when the caller programs the returned value.
inline std::uint8_t next_write_epoch(PcmBlock& block, const WearConfig& wear, unsigned g) {
  std::uint8_t epoch = block.meta.epoch;
  if (wear.enabled && g > 1 && block.writes_since_epoch >= wear.epoch_writes) {
    epoch = static_cast<std::uint8_t>((epoch + 1u) % g);
    block.writes_since_epoch = 0;
  }
  ++block.writes_since_epoch;
  return epoch;
}

/// Start-gap block remapping over n logical blocks and n + 1 physical slots.
class StartGap {
 public:
  explicit StartGap(std::size_t logical_blocks) : n_(logical_blocks), gap_(logical_blocks) {}

  std::size_t logical_blocks() const { return n_; }
  std::size_t physical_blocks() const { return n_ + 1; }
  std::size_t gap() const { return gap_; }
  std::size_t start() const { return start_; }

  std::size_t to_physical(std::size_t logical) const {
    assert(logical < n_);
    std::size_t pa = (logical + start_) % n_;
    if (pa >= gap_) ++pa;
    return pa;
  }

  std::optional<std::size_t> to_logical(std::size_t physical) const {
    if (physical == gap_ || physical > n_) return std::nullopt;
    const std::size_t slot = physical > gap_ ? physical - 1 : physical;
    return (slot + n_ - start_) % n_;
  }

  /// One gap movement. Returns {source, destination}: the caller copies the
  /// source slot into the destination before relying on the new mapping.
  std::pair<std::size_t, std::size_t> step() {
    const std::size_t dst = gap_;
    std::size_t src;
    if (gap_ == 0) {
      src = n_;
      gap_ = n_;
      start_ = (start_ + 1) % n_;
    } else {
      src = gap_ - 1;
      --gap_;
    }
    return {src, dst};
  }

 private:
  std::size_t n_;
  std::size_t gap_;
  std::size_t start_ = 0;
};

}  // namespace wire
