#pragma once

// Second implementations used as test oracles. Deliberately naive: they
// share no code with the library beyond plain containers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <list>
#include <vector>

namespace oracle {

inline unsigned popcount_loop(std::uint64_t v) {
  unsigned n = 0;
  for (int i = 0; i < 64; ++i) n += (v >> i) & 1u;
  return n;
}

// String-free bit vector helpers on vector<int>.
inline std::vector<int> rotr(const std::vector<int>& v, std::size_t r) {
  const std::size_t n = v.size();
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[(i + r) % n] = v[i];
  return out;
}

inline std::size_t distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

struct Rotation {
  std::size_t r;
  std::size_t d;
};

// Minimum over every rotation, ties to `current` then to the smaller r.
inline Rotation best_rotation(const std::vector<int>& enc, const std::vector<int>& stored, std::size_t current,
                              std::size_t rmax) {
  std::vector<std::size_t> d;
  for (std::size_t r = 0; r <= rmax; ++r) d.push_back(distance(rotr(enc, r), stored));
  std::size_t best = d[0];
  for (auto x : d) best = x < best ? x : best;
  if (current <= rmax && d[current] == best) return {current, best};
  for (std::size_t r = 0; r <= rmax; ++r)
    if (d[r] == best) return {r, best};
  return {0, best};
}

// Eq. 1 written out with explicit sums over rows and columns.
inline double intrav(const std::vector<std::vector<double>>& bf) {
  const double n = static_cast<double>(bf.size());
  const double c = static_cast<double>(bf[0].size());
  double all = 0;
  for (const auto& row : bf)
    for (double x : row) all += x;
  const double aver = all / (n * c);
  if (aver == 0) return 0;
  double acc = 0;
  for (const auto& row : bf) {
    double s = 0;
    for (double x : row) s += x;
    const double m = s / c;
    double q = 0;
    for (double x : row) q += (x - m) * (x - m);
    acc += std::sqrt(q / (c - 1));
  }
  return acc / (aver * n);
}

// LRU over a linked list with linear search.
class Lru {
 public:
  explicit Lru(std::size_t cap) : cap_(cap) {}
  bool access(std::uint64_t k) {
    for (auto it = l_.begin(); it != l_.end(); ++it)
      if (*it == k) {
        l_.erase(it);
        l_.push_front(k);
        return true;
      }
    if (cap_ == 0) return false;
    if (l_.size() == cap_) l_.pop_back();
    l_.push_front(k);
    return false;
  }

 private:
  std::size_t cap_;
  std::list<std::uint64_t> l_;
};

// Start-gap simulated as an explicit array of slots holding logical ids
// (-1 for the gap).
class SlotArray {
 public:
  explicit SlotArray(std::size_t n) : slots_(n + 1) {
    for (std::size_t i = 0; i < n; ++i) slots_[i] = static_cast<long>(i);
    slots_[n] = -1;
  }
  void step() {
    std::size_t g = 0;
    while (slots_[g] != -1) ++g;
    const std::size_t src = g == 0 ? slots_.size() - 1 : g - 1;
    slots_[g] = slots_[src];
    slots_[src] = -1;
  }
  std::size_t where(long logical) const {
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i] == logical) return i;
    return slots_.size();
  }

 private:
  std::vector<long> slots_;
};

}  // namespace oracle
