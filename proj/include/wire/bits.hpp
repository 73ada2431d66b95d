#pragma once

// Cell-array helpers. A block is held as one byte per cell (0 or 1), with
// cell 0 being the most significant bit of payload byte 0, so a 4-bit
// granule reads left to right the way its hex digit is written.

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wire {

using CellArray = std::vector<std::uint8_t>;
using Cells = std::span<const std::uint8_t>;

inline CellArray bytes_to_cells(std::span<const std::uint8_t> bytes) {
  CellArray cells(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (unsigned b = 0; b < 8; ++b) cells[i * 8 + b] = (bytes[i] >> (7 - b)) & 1u;
  return cells;
}

inline std::vector<std::uint8_t> cells_to_bytes(Cells cells) {
  assert(cells.size() % 8 == 0);
  std::vector<std::uint8_t> bytes(cells.size() / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bytes;
}

/// Parses "1001"-style strings; test and example convenience.
inline CellArray cells_from_string(const char* s) {
  CellArray out;
  for (; *s; ++s)
    if (*s == '0' || *s == '1') out.push_back(static_cast<std::uint8_t>(*s - '0'));
  return out;
}

inline std::size_t hamming(Cells a, Cells b) {
  assert(a.size() == b.size());
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

/// Hamming distance between rotate_right(encoded, r) and stored, without
/// materializing the rotation. Cell i of the rotated image is encoded[i - r].
inline std::size_t hamming_rotated(Cells encoded, Cells stored, std::size_t r) {
  const std::size_t n = encoded.size();
  assert(stored.size() == n && r < n);
  std::size_t d = 0;
  for (std::size_t i = 0; i < r; ++i) d += (stored[i] != encoded[n - r + i]);
  for (std::size_t i = r; i < n; ++i) d += (stored[i] != encoded[i - r]);
  return d;
}

/// Cyclic shift toward higher cell indices: out[(i + r) % n] = in[i].
inline void rotate_right_into(Cells in, std::span<std::uint8_t> out, std::size_t r) {
  const std::size_t n = in.size();
  assert(out.size() == n);
  if (n == 0) return;
  r %= n;
  std::copy(in.end() - static_cast<std::ptrdiff_t>(r), in.end(), out.begin());
  std::copy(in.begin(), in.end() - static_cast<std::ptrdiff_t>(r), out.begin() + static_cast<std::ptrdiff_t>(r));
}

inline void rotate_left_into(Cells in, std::span<std::uint8_t> out, std::size_t r) {
  const std::size_t n = in.size();
  if (n == 0) return;
  rotate_right_into(in, out, (n - r % n) % n);
}

inline CellArray rotate_right(Cells in, std::size_t r) {
  CellArray out(in.size());
  rotate_right_into(in, out, r);
  return out;
}

inline CellArray rotate_left(Cells in, std::size_t r) {
  CellArray out(in.size());
  rotate_left_into(in, out, r);
  return out;
}

/// Value of granule `index` (width g, MSB first).
inline std::uint32_t granule_at(Cells cells, std::size_t index, unsigned g) {
  std::uint32_t v = 0;
  const std::size_t base = index * g;
  for (unsigned b = 0; b < g; ++b) v = (v << 1) | cells[base + b];
  return v;
}

inline void set_granule(std::span<std::uint8_t> cells, std::size_t index, unsigned g, std::uint32_t v) {
  const std::size_t base = index * g;
  for (unsigned b = 0; b < g; ++b) cells[base + b] = (v >> (g - 1 - b)) & 1u;
}

inline std::uint32_t width_mask(unsigned width) {
  return width >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << width) - 1);
}

/// Rotate a `width`-bit value left by `shift` positions.
inline std::uint32_t rotl_width(std::uint32_t v, unsigned shift, unsigned width) {
  if (width == 0) return v;
  shift %= width;
  v &= width_mask(width);
  if (shift == 0) return v;
  return ((v << shift) | (v >> (width - shift))) & width_mask(width);
}

inline std::uint32_t rotr_width(std::uint32_t v, unsigned shift, unsigned width) {
  if (width == 0) return v;
  return rotl_width(v, (width - shift % width) % width, width);
}

/// k-th element of the binary reflected Gray sequence.
constexpr std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

inline unsigned popcount32(std::uint32_t v) { return static_cast<unsigned>(std::popcount(v)); }

}  // namespace wire
