#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

namespace minklab {

inline constexpr int kMaxDim = 4;

/// Point or vector in R^d, stored inline for d <= kMaxDim.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
/// d x d matrix, stored inline.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Axis-aligned box [lo, hi].
struct BoundingBox {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const { return (hi.array() < lo.array()).any(); }
  double volume() const {
    if (empty()) return 0.0;
    return (hi - lo).prod();
  }
  bool contains(const Vec& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
  BoundingBox inflated(double r) const {
    return {(lo.array() - r).matrix(), (hi.array() + r).matrix()};
  }
  static BoundingBox of_empty(int d) {
    return {Vec::Constant(d, 1.0), Vec::Constant(d, -1.0)};
  }
};

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b);
BoundingBox box_intersection(const BoundingBox& a, const BoundingBox& b);

}  // namespace minklab
