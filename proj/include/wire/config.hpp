#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "wire/error.hpp"

namespace wire {

/// Geometry, endurance and energy parameters of the PCM array.
struct PcmConfig {
  std::size_t block_bytes = 64;
  std::size_t partitions_per_block = 8;
  unsigned rotation_max = 8;   // largest per-partition rotation, in bits
  unsigned counter_bits = 6;   // width of one rotation counter
  unsigned granule_bits = 4;   // codebook granularity
  std::uint64_t cell_endurance = 1000;
  double e_set = 13.5;    // pJ per 0->1 program
  double e_reset = 19.2;  // pJ per 1->0 program
  double write_latency_ns = 250.0;
  std::size_t page_bytes = 4096;
  std::size_t metadata_cache_bytes = 2048;
  bool count_metadata_flips = true;

  std::size_t block_bits() const { return block_bytes * 8; }
  std::size_t partition_bits() const { return block_bits() / partitions_per_block; }
  std::size_t granules_per_block() const { return block_bits() / granule_bits; }
  std::size_t blocks_per_page() const { return page_bytes / block_bytes; }
  /// Rotation-counter storage per block (48 with the defaults).
  std::size_t counter_bits_per_block() const { return std::size_t{counter_bits} * partitions_per_block; }

  void validate() const {
    if (block_bytes == 0) throw ConfigError("block_bytes must be positive");
    if (partitions_per_block == 0) throw ConfigError("partitions_per_block must be positive");
    if (granule_bits == 0 || granule_bits > 16) throw ConfigError("granule_bits must be in [1, 16]");
    if (counter_bits == 0 || counter_bits > 16) throw ConfigError("counter_bits must be in [1, 16]");
    if (block_bits() % partitions_per_block != 0)
      throw ConfigError("block bits must be divisible by partitions_per_block");
    if (partition_bits() % granule_bits != 0)
      throw ConfigError("partition width must be divisible by granule_bits");
    if (rotation_max >= partition_bits()) throw ConfigError("rotation_max must be below the partition width");
    if (rotation_max >= (1u << counter_bits)) throw ConfigError("rotation_max must fit in counter_bits");
    if (cell_endurance == 0) throw ConfigError("cell_endurance must be positive");
    if (!(e_set > 0.0) || !(e_reset > 0.0)) throw ConfigError("e_set and e_reset must be positive");
    if (write_latency_ns < 0.0) throw ConfigError("write_latency_ns must be non-negative");
    if (page_bytes == 0 || page_bytes % block_bytes != 0)
      throw ConfigError("page_bytes must be a positive multiple of block_bytes");
  }
};

/// Sizes of the frequent-value finder tables and the codebook policy.
struct MfvConfig {
  std::size_t fifo_entries = 16;
  unsigned sat_max = 7;
  unsigned replace_threshold = 1;
  std::size_t fv_entries = 16;
  std::uint32_t fv_counter_max = std::numeric_limits<std::uint32_t>::max();
  /// Ranked values that receive chained codewords; 0 means every used FV entry.
  std::size_t codebook_mfvs = 8;
  /// Writes between checks of the FV ranking for a codebook rebuild.
  std::uint64_t rebuild_interval = 1024;

  void validate() const {
    if (fifo_entries == 0) throw ConfigError("mfv.fifo_entries must be positive");
    if (sat_max == 0) throw ConfigError("mfv.sat_max must be positive");
    if (replace_threshold > sat_max) throw ConfigError("mfv.replace_threshold must not exceed sat_max");
    if (rebuild_interval == 0) throw ConfigError("wire.rebuild_interval must be positive");
  }
};

struct FnwConfig {
  std::size_t word_bits = 16;

  void validate(const PcmConfig& pcm) const {
    if (word_bits == 0 || pcm.block_bits() % word_bits != 0)
      throw ConfigError("fnw.word_bits must divide the block width");
  }
};

struct WearConfig {
  bool enabled = false;
  std::uint64_t epoch_writes = 256;
  std::uint64_t remap_period = 10000;

  void validate() const {
    if (epoch_writes == 0) throw ConfigError("wear.epoch_writes must be positive");
    if (remap_period == 0) throw ConfigError("wear.remap_period must be positive");
  }
};

/// Everything one simulated memory needs besides the scheme choice.
struct SimConfig {
  std::size_t memory_blocks = 1024;
  PcmConfig pcm;
  MfvConfig mfv;
  FnwConfig fnw;
  WearConfig wear;

  void validate() const {
    if (memory_blocks == 0) throw ConfigError("memory.blocks must be positive");
    pcm.validate();
    mfv.validate();
    fnw.validate(pcm);
    wear.validate();
  }
};

}  // namespace wire
