#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace spectro {

/// Multi-index k in N^d labelling Hermite windows and spectrogram orders.
struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> k) : entries(std::move(k)) {
    for (int e : entries)
      if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }
  /// 1D convenience.
  static MultiIndex single(int n) { return MultiIndex(std::vector<int>{n}); }
  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
  /// Unit vector e_axis in d dimensions.
  static MultiIndex unit(int d, int axis) {
    std::vector<int> k(d, 0);
    k.at(axis) = 1;
    return MultiIndex(std::move(k));
  }

  int dim() const { return static_cast<int>(entries.size()); }
  int order() const { return std::accumulate(entries.begin(), entries.end(), 0); }
  int operator[](int j) const { return entries[j]; }

  bool operator==(const MultiIndex& o) const = default;
};

/// All k in N^d with |k| = j, in lexicographic order.
/// The count is binom(j+d-1, d-1).
inline std::vector<MultiIndex> multi_indices(int d, int j) {
  if (d < 1 || j < 0) throw std::invalid_argument("multi_indices: need d >= 1, j >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> k(d, 0);
  // Recurse over positions; lexicographic order emerges from filling axis 0 upward.
  auto rec = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == d - 1) {
      k[axis] = remaining;
      out.emplace_back(k);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[axis] = v;
      self(self, axis + 1, remaining - v);
    }
  };
  rec(rec, 0, j);
  return out;
}

}  // namespace spectro
