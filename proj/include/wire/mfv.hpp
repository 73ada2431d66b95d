#pragma once

// Frequent-value finder (a saturating FIFO filter feeding a small FV table)
// and the codebook that gives consecutively ranked frequent values codewords
// one bit apart.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "wire/bits.hpp"
#include "wire/config.hpp"
#include "wire/error.hpp"

namespace wire {

struct FifoEntry {
  std::uint32_t value = 0;
  unsigned sat_counter = 0;
  bool occupied = false;
};

/// Filters out transient values. A value that keeps recurring saturates its
/// counter and is reported as frequent.
class FifoFilter {
 public:
  FifoFilter(std::size_t entries, unsigned sat_max, unsigned replace_threshold)
      : slots_(entries), sat_max_(sat_max), threshold_(replace_threshold) {}

  enum class Result { inserted, dropped, counted, saturated };

  Result observe(std::uint32_t value) {
    if (auto* e = slot_of(value)) {
      e->sat_counter = std::min(e->sat_counter + 1, sat_max_);
      return e->sat_counter == sat_max_ ? Result::saturated : Result::counted;
    }
    for (auto& e : slots_)
      if (e.occupied && e.sat_counter > 0) --e.sat_counter;
    FifoEntry* victim = nullptr;
    for (auto& e : slots_)
      if (!e.occupied) {
        victim = &e;
        break;
      }
    if (!victim)
      for (auto& e : slots_)
        if (e.sat_counter < threshold_) {
          victim = &e;
          break;
        }
    if (!victim) return Result::dropped;
    *victim = FifoEntry{value, 1, true};
    // sat_max of 1 promotes on first sight.
    return victim->sat_counter >= sat_max_ ? Result::saturated : Result::inserted;
  }

  void erase(std::uint32_t value) {
    if (auto* e = slot_of(value)) *e = FifoEntry{};
  }

  const FifoEntry* find(std::uint32_t value) const {
    for (const auto& e : slots_)
      if (e.occupied && e.value == value) return &e;
    return nullptr;
  }

  std::span<const FifoEntry> entries() const { return slots_; }
  unsigned sat_max() const { return sat_max_; }

 private:
  FifoEntry* slot_of(std::uint32_t value) {
    for (auto& e : slots_)
      if (e.occupied && e.value == value) return &e;
    return nullptr;
  }

  std::vector<FifoEntry> slots_;
  unsigned sat_max_;
  unsigned threshold_;
};

struct FvEntry {
  std::uint32_t value = 0;
  std::uint32_t counter = 0;
  std::uint64_t pointer = 0;  // blocks currently holding this value as an MFV
  bool used = false;          // false marks a Gap line
};

class FvTable {
 public:
  explicit FvTable(std::size_t entries, std::uint32_t counter_max = ~std::uint32_t{0})
      : lines_(entries), counter_max_(counter_max) {}

  /// Places `value` in the first Gap line. False when there is no Gap.
  bool insert(std::uint32_t value) {
    if (find(value)) return true;
    for (auto& l : lines_)
      if (!l.used) {
        l = FvEntry{value, 0, 0, true};
        return true;
      }
    return false;
  }

  bool contains(std::uint32_t value) const { return find(value) != nullptr; }

  /// Counts one access to a frequent value; saturates at counter_max.
  bool bump(std::uint32_t value) {
    auto* l = find(value);
    if (!l) return false;
    if (l->counter < counter_max_) ++l->counter;
    return true;
  }

  bool add_reference(std::uint32_t value) {
    auto* l = find(value);
    if (!l) return false;
    ++l->pointer;
    return true;
  }

  /// Drops one block reference; the line becomes a Gap when none remain.
  void retire_reference(std::uint32_t value) {
    auto* l = find(value);
    if (!l || l->pointer == 0) {
      ++unknown_retires_;
      return;
    }
    if (--l->pointer == 0) *l = FvEntry{};
  }

  /// Used values by descending counter, ties by ascending value.
  std::vector<std::uint32_t> ranked(std::size_t limit = 0) const {
    std::vector<const FvEntry*> used;
    for (const auto& l : lines_)
      if (l.used) used.push_back(&l);
    std::sort(used.begin(), used.end(), [](const FvEntry* a, const FvEntry* b) {
      return a->counter != b->counter ? a->counter > b->counter : a->value < b->value;
    });
    if (limit != 0 && used.size() > limit) used.resize(limit);
    std::vector<std::uint32_t> out;
    out.reserve(used.size());
    for (const auto* l : used) out.push_back(l->value);
    return out;
  }

  const FvEntry* entry(std::uint32_t value) const { return find(value); }
  std::span<const FvEntry> lines() const { return lines_; }
  std::span<FvEntry> lines() { return lines_; }
  std::uint64_t unknown_retires() const { return unknown_retires_; }

 private:
  const FvEntry* find(std::uint32_t value) const {
    for (const auto& l : lines_)
      if (l.used && l.value == value) return &l;
    return nullptr;
  }
  FvEntry* find(std::uint32_t value) {
    return const_cast<FvEntry*>(static_cast<const FvTable*>(this)->find(value));
  }

  std::vector<FvEntry> lines_;
  std::uint32_t counter_max_;
  std::uint64_t unknown_retires_ = 0;
};

/// The two tables working together.
class MfvFinder {
 public:
  explicit MfvFinder(const MfvConfig& cfg = {})
      : fifo_(cfg.fifo_entries, cfg.sat_max, cfg.replace_threshold),
        table_(cfg.fv_entries, cfg.fv_counter_max) {}

  /// Returns the value when this observation saturates it in the FIFO.
  /// Values already in the FV table only bump their FV counter.
  std::optional<std::uint32_t> observe(std::uint32_t value) {
    if (table_.bump(value)) return std::nullopt;
    if (fifo_.observe(value) != FifoFilter::Result::saturated) return std::nullopt;
    if (table_.insert(value)) {
      fifo_.erase(value);
    } else {
      ++promotions_without_gap_;
    }
    return value;
  }

  const FifoFilter& fifo() const { return fifo_; }
  const FvTable& table() const { return table_; }
  FvTable& table() { return table_; }
  std::uint64_t promotions_without_gap() const { return promotions_without_gap_; }

 private:
  FifoFilter fifo_;
  FvTable table_;
  std::uint64_t promotions_without_gap_ = 0;
};

/// Bijection on g-bit values. Rank k (0-based) of the frequent values gets
/// gray(k); all other values take the unused codewords in ascending order.
class Codebook {
 public:
  Codebook() : Codebook(identity(4)) {}

  static Codebook identity(unsigned g) {
    Codebook cb(g);
    for (std::uint32_t v = 0; v < cb.perm_.size(); ++v) cb.perm_[v] = cb.inv_[v] = v;
    return cb;
  }

  static Codebook build(std::span<const std::uint32_t> ranked, unsigned g) {
    if (g == 0 || g > 16) throw ConfigError("codebook granule width must be in [1, 16]");
    Codebook cb(g);
    const std::uint32_t n = std::uint32_t{1} << g;
    if (ranked.size() > n) throw ConfigError("more ranked values than codewords");
    std::vector<bool> value_taken(n, false), code_taken(n, false);
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      const auto v = ranked[k];
      if (v >= n) throw ConfigError("ranked value " + std::to_string(v) + " exceeds granule width");
      if (value_taken[v]) throw ConfigError("duplicate ranked value " + std::to_string(v));
      const auto c = gray(static_cast<std::uint32_t>(k));
      cb.perm_[v] = c;
      value_taken[v] = code_taken[c] = true;
    }
    std::uint32_t next_code = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (value_taken[v]) continue;
      while (code_taken[next_code]) ++next_code;
      cb.perm_[v] = next_code;
      code_taken[next_code] = true;
    }
    for (std::uint32_t v = 0; v < n; ++v) cb.inv_[cb.perm_[v]] = v;
    cb.ranked_.assign(ranked.begin(), ranked.end());
    return cb;
  }

  std::uint32_t encode(std::uint32_t value) const { return perm_[value]; }
  std::uint32_t decode(std::uint32_t codeword) const { return inv_[codeword]; }

  unsigned granule_bits() const { return g_; }
  std::span<const std::uint32_t> ranked() const { return ranked_; }
  std::span<const std::uint32_t> permutation() const { return perm_; }

  bool is_identity() const {
    for (std::uint32_t v = 0; v < perm_.size(); ++v)
      if (perm_[v] != v) return false;
    return true;
  }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.g_ == b.g_ && a.perm_ == b.perm_ && a.ranked_ == b.ranked_;
  }

  /// Text table: a version line, the granule width, then one row per value
  /// (rank or "-", value hex, codeword hex). Ranked rows come first.
  void dump(std::ostream& os) const {
    os << "# wire-codebook v1\n";
    os << "granule_bits " << g_ << "\n";
    os << "# rank value codeword\n";
    std::vector<bool> ranked_value(perm_.size(), false);
    for (std::size_t k = 0; k < ranked_.size(); ++k) {
      os << (k + 1) << ' ' << hex(ranked_[k]) << ' ' << hex(perm_[ranked_[k]]) << '\n';
      ranked_value[ranked_[k]] = true;
    }
    for (std::uint32_t v = 0; v < perm_.size(); ++v)
      if (!ranked_value[v]) os << "- " << hex(v) << ' ' << hex(perm_[v]) << '\n';
  }

  static Codebook load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "# wire-codebook v1")
      throw ConfigError("codebook: missing or unsupported version line");
    unsigned g = 0;
    {
      std::string key;
      if (!std::getline(is, line)) throw ConfigError("codebook: missing granule_bits");
      std::istringstream ls(line);
      if (!(ls >> key >> g) || key != "granule_bits" || g == 0 || g > 16)
        throw ConfigError("codebook: bad granule_bits line");
    }
    Codebook cb(g);
    const std::uint32_t n = std::uint32_t{1} << g;
    std::vector<bool> seen_value(n, false), seen_code(n, false);
    std::vector<std::pair<std::size_t, std::uint32_t>> ranks;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string rank, vs, cs;
      if (!(ls >> rank >> vs >> cs)) throw ConfigError("codebook: malformed row '" + line + "'");
      const auto v = static_cast<std::uint32_t>(std::stoul(vs, nullptr, 16));
      const auto c = static_cast<std::uint32_t>(std::stoul(cs, nullptr, 16));
      if (v >= n || c >= n || seen_value[v] || seen_code[c])
        throw ConfigError("codebook: row '" + line + "' breaks the bijection");
      seen_value[v] = seen_code[c] = true;
      cb.perm_[v] = c;
      cb.inv_[c] = v;
      if (rank != "-") ranks.emplace_back(std::stoul(rank), v);
      ++rows;
    }
    if (rows != n) throw ConfigError("codebook: expected " + std::to_string(n) + " rows");
    std::sort(ranks.begin(), ranks.end());
    for (const auto& [r, v] : ranks) cb.ranked_.push_back(v);
    return cb;
  }

 private:
  explicit Codebook(unsigned g) : g_(g), perm_(std::size_t{1} << g), inv_(std::size_t{1} << g) {}

  static std::string hex(std::uint32_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
  }

  unsigned g_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::uint32_t> ranked_;
};

inline Codebook build_codebook(std::span<const std::uint32_t> ranked, unsigned g) {
  return Codebook::build(ranked, g);
}

inline std::uint32_t encode_granule(const Codebook& cb, std::uint32_t value) { return cb.encode(value); }
inline std::uint32_t decode_granule(const Codebook& cb, std::uint32_t codeword) { return cb.decode(codeword); }

}  // namespace wire
