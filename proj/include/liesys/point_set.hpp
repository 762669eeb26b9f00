#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "liesys/lie_core.hpp"

namespace liesys {

/// Insertion-ordered set of chart points, deduplicated at a fixed max-norm tolerance.
///
/// Points are bucketed on a grid of cell size `tol`; a query inspects the 3^d neighboring
/// cells, so two points within `tol` of each other always collide regardless of where
/// the grid lines fall. On collision the first representative is kept.
class PointSet {
 public:
  explicit PointSet(double tol = 1e-9) : tol_(tol) {}

  [[nodiscard]] double tol() const { return tol_; }
  [[nodiscard]] size_t size() const { return points_.size(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] const std::vector<GroupElement>& points() const { return points_; }
  [[nodiscard]] const GroupElement& operator[](size_t i) const { return points_[i]; }

  // Index of a stored point within tol of p, or -1.
  [[nodiscard]] std::ptrdiff_t find(const GroupElement& p) const {
    const Cell base = cell_of(p);
    Cell probe = base;
    return search(p, base, probe, 0);
  }

  [[nodiscard]] bool contains(const GroupElement& p) const { return find(p) >= 0; }

  // Returns true if p was new.
  bool insert(const GroupElement& p) {
    if (contains(p)) return false;
    buckets_[cell_of(p)].push_back(points_.size());
    points_.push_back(p);
    return true;
  }

  // Every point of `other` has a representative here.
  [[nodiscard]] bool includes(const PointSet& other) const {
    for (const auto& p : other.points_)
      if (!contains(p)) return false;
    return true;
  }

  [[nodiscard]] bool equals(const PointSet& other) const { return includes(other) && other.includes(*this); }

  // Points sorted lexicographically by chart coordinates.
  [[nodiscard]] std::vector<GroupElement> sorted() const {
    std::vector<GroupElement> out = points_;
    std::sort(out.begin(), out.end(), [](const GroupElement& a, const GroupElement& b) {
      return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(), b.coords.end());
    });
    return out;
  }

 private:
  using Cell = std::vector<std::int64_t>;

  struct CellHash {
    size_t operator()(const Cell& c) const {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto v : c) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<size_t>(h);
    }
  };

  [[nodiscard]] Cell cell_of(const GroupElement& p) const {
    Cell c(static_cast<size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) c[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::floor(p[i] / tol_));
    return c;
  }

  std::ptrdiff_t search(const GroupElement& p, const Cell& base, Cell& probe, size_t axis) const {
    if (axis == base.size()) {
      auto it = buckets_.find(probe);
      if (it == buckets_.end()) return -1;
      for (size_t idx : it->second)
        if (chart_distance(points_[idx], p) <= tol_) return static_cast<std::ptrdiff_t>(idx);
      return -1;
    }
    for (std::int64_t off = -1; off <= 1; ++off) {
      probe[axis] = base[axis] + off;
      if (auto r = search(p, base, probe, axis + 1); r >= 0) {
        probe[axis] = base[axis];
        return r;
      }
    }
    probe[axis] = base[axis];
    return -1;
  }

  double tol_;
  std::vector<GroupElement> points_;
  std::unordered_map<Cell, std::vector<size_t>, CellHash> buckets_;
};

}  // namespace liesys
