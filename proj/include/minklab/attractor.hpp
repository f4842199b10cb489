#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "minklab/similarity.hpp"

namespace minklab {

struct BoundingBall {
  Vec center;
  double radius = 0.0;
};

/// Two-sided bracket lower <= d(x, A) <= upper; witness is a point of A at
/// distance upper from x.
struct DistanceBracket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Vec witness;
};

/// Geometry queries against the attractor F of an IFS. Immutable and safe to
/// share across threads.
class Attractor {
 public:
  explicit Attractor(IteratedFunctionSystem ifs);

  const IteratedFunctionSystem& ifs() const { return ifs_; }
  int dim() const { return ifs_.dim(); }
  /// Ball B(c, R) with S_i(B) ⊆ B for every map, hence F ⊆ B.
  const BoundingBall& ball() const { return ball_; }
  /// A point of F (the fixed point of the first map).
  const Vec& anchor() const { return anchor_; }

  /// Images S_w(seed) over the minimal words with r_w * 2R <= delta.
  std::vector<Vec> points(double delta, std::size_t cap = 10'000'000) const;
  std::vector<Vec> points(const Vec& seed, double delta, std::size_t cap = 10'000'000) const;

  /// Bracket of d(x, root(F)) with upper - lower <= tol, or lower > cutoff.
  DistanceBracket bracket(const Vec& x, double tol, double cutoff = std::numeric_limits<double>::infinity(),
                          const Similarity* root = nullptr) const;

  double distance(const Vec& x, double tol) const;
  /// Distance from x to the first-level piece S_i(F).
  double distance_to_piece(int i, const Vec& x, double tol) const;
  Vec nearest_point(const Vec& x, double tol) const;

  /// Box containing F, from a point cover of resolution tol.
  BoundingBox bounding_box(double tol) const;
  int affine_hull_dimension(double tol) const;

  /// Vertices of conv(F) when an invariant polytope hull was found.
  const std::vector<Vec>& hull_vertices() const { return hull_; }
  bool has_hull() const { return !hull_.empty(); }

 private:
  IteratedFunctionSystem ifs_;
  BoundingBall ball_;
  Vec anchor_;
  std::vector<Vec> hull_;
};

/// Certified lower and feasible upper bound of the distance from y to the
/// convex hull of pts (minimum-norm-point iteration).
std::pair<double, double> hull_distance_bounds(const std::vector<Vec>& pts, const Vec& y);

}  // namespace minklab
