#pragma once

#include <memory>
#include <string>
#include <vector>

#include "minklab/similarity.hpp"

namespace minklab {

/// {x : normal . x < offset}, or <= for closed polytopes.
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};

enum class BoxRelation { Inside, Outside, Unknown };

namespace detail {
struct RegionNode;
}

/// Implicit region given by a membership predicate over a tree of
/// primitives. Regions are immutable and cheap to copy.
class Region {
 public:
  static Region polytope(std::vector<HalfSpace> faces, bool closed = false);
  static Region box(const Vec& lo, const Vec& hi, bool closed = false);
  /// Convex polygon from its vertices in either orientation.
  static Region convex_polygon(const std::vector<Vec>& vertices, bool closed = false);
  static Region unite(std::vector<Region> parts);
  static Region intersect(std::vector<Region> parts);

  Region complement() const;
  Region image(const Similarity& map) const;

  int dim() const;
  bool contains(const Vec& x) const;
  /// x and its 2d axis offsets x ± tol e_k all lie in the region.
  bool contains_robustly(const Vec& x, double tol) const;
  /// x and its 2d axis offsets all lie outside the region.
  bool excludes_robustly(const Vec& x, double tol) const;
  /// Relation of the convex hull of the given points to the region
  /// (conservative: Unknown when undecided).
  BoxRelation relation(const std::vector<Vec>& hull_points) const;
  BoxRelation relation(const BoundingBox& box) const;

  /// Bounding box; infinite coordinates for unbounded regions.
  const BoundingBox& bounds() const;
  bool is_bounded() const;

  /// Vertex loops of the planar convex pieces, when the region is a planar
  /// polytope, an image of one, or a union of such regions.
  bool has_polygons() const;
  std::vector<std::vector<Vec>> polygons() const;

  std::string kind() const;

  const detail::RegionNode& node() const { return *node_; }

 private:
  explicit Region(std::shared_ptr<const detail::RegionNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::RegionNode> node_;
};

/// Γ = O \ ∪ S_i O as a membership predicate.
class GammaRegion {
 public:
  GammaRegion(const IteratedFunctionSystem& ifs, Region open_set);

  bool contains(const Vec& x) const;
  BoxRelation relation(const BoundingBox& box) const;
  const Region& open_set() const { return open_set_; }
  const std::vector<Region>& images() const { return images_; }
  const BoundingBox& bounds() const { return open_set_.bounds(); }
  int dim() const { return open_set_.dim(); }
  /// Equivalent region tree O ∩ complement(∪ S_i O).
  Region as_region() const;

 private:
  Region open_set_;
  std::vector<Region> images_;
};

GammaRegion gamma(const IteratedFunctionSystem& ifs, const Region& open_set);

/// Corners of a box (2^d points).
std::vector<Vec> box_corners(const BoundingBox& box);

}  // namespace minklab
