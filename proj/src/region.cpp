#include "minklab/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "minklab/errors.hpp"

namespace minklab {
namespace detail {

struct RegionNode {
  virtual ~RegionNode() = default;
  virtual bool contains(const Vec& x) const = 0;
  virtual BoxRelation relation(const std::vector<Vec>& pts) const = 0;
  virtual bool has_polygons() const { return false; }
  virtual void collect_polygons(std::vector<std::vector<Vec>>&) const {}
  virtual std::string kind() const = 0;
  BoundingBox bounds;
  int dim = 0;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundingBox unbounded_box(int d) {
  return {Vec::Constant(d, -kInf), Vec::Constant(d, kInf)};
}

// Vertices of the polytope {n.x <= b} by solving all d-subsets of faces.
std::vector<Vec> enumerate_vertices(const std::vector<HalfSpace>& faces, int d) {
  std::vector<Vec> out;
  const int m = static_cast<int>(faces.size());
  if (m < d) return out;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    Mat a(d, d);
    Vec b(d);
    for (int r = 0; r < d; ++r) {
      const auto& f = faces[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
      a.row(r) = f.normal.transpose();
      b(r) = f.offset;
    }
    auto lu = a.fullPivLu();
    if (lu.isInvertible()) {
      Vec x = lu.solve(b);
      bool ok = true;
      for (const auto& f : faces)
        if (f.normal.dot(x) > f.offset + 1e-9 * (1.0 + std::abs(f.offset))) {
          ok = false;
          break;
        }
      if (ok) out.push_back(x);
    }
    int k = d - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - d + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<Vec> order_planar(std::vector<Vec> pts) {
  Vec c = Vec::Zero(2);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  std::vector<Vec> uniq;
  for (const auto& p : pts)
    if (uniq.empty() || (p - uniq.back()).norm() > 1e-12) uniq.push_back(p);
  if (uniq.size() > 1 && (uniq.front() - uniq.back()).norm() <= 1e-12) uniq.pop_back();
  return uniq;
}

struct PolytopeNode final : RegionNode {
  std::vector<HalfSpace> faces;
  std::vector<Vec> vertices;
  bool closed = false;

  bool contains(const Vec& x) const override {
    for (const auto& f : faces) {
      double v = f.normal.dot(x);
      if (closed ? v > f.offset : v >= f.offset) return false;
    }
    return true;
  }
  BoxRelation relation(const std::vector<Vec>& pts) const override {
    bool all_inside = true;
    for (const auto& f : faces) {
      bool all_out = true;
      for (const auto& p : pts) {
        double v = f.normal.dot(p);
        bool in = closed ? v <= f.offset : v < f.offset;
        if (in) all_out = false;
        else all_inside = false;
      }
      if (all_out) return BoxRelation::Outside;
    }
    return all_inside ? BoxRelation::Inside : BoxRelation::Unknown;
  }
  bool has_polygons() const override { return dim == 2 && vertices.size() >= 3; }
  void collect_polygons(std::vector<std::vector<Vec>>& out) const override {
    if (has_polygons()) out.push_back(order_planar(vertices));
  }
  std::string kind() const override { return "polytope"; }
};

struct ImageNode final : RegionNode {
  Similarity map = Similarity::identity(1);
  std::shared_ptr<const RegionNode> inner;

  bool contains(const Vec& x) const override { return inner->contains(map.apply_inverse(x)); }
  BoxRelation relation(const std::vector<Vec>& pts) const override {
    std::vector<Vec> pre;
    pre.reserve(pts.size());
    for (const auto& p : pts) pre.push_back(map.apply_inverse(p));
    return inner->relation(pre);
  }
  bool has_polygons() const override { return inner->has_polygons(); }
  void collect_polygons(std::vector<std::vector<Vec>>& out) const override {
    std::vector<std::vector<Vec>> tmp;
    inner->collect_polygons(tmp);
    for (auto& loop : tmp) {
      for (auto& v : loop) v = map.apply(v);
      out.push_back(std::move(loop));
    }
  }
  std::string kind() const override { return "image"; }
};

struct UnionNode final : RegionNode {
  std::vector<std::shared_ptr<const RegionNode>> parts;

  bool contains(const Vec& x) const override {
    for (const auto& p : parts)
      if (p->contains(x)) return true;
    return false;
  }
  BoxRelation relation(const std::vector<Vec>& pts) const override {
    bool all_out = true;
    for (const auto& p : parts) {
      BoxRelation r = p->relation(pts);
      if (r == BoxRelation::Inside) return BoxRelation::Inside;
      if (r != BoxRelation::Outside) all_out = false;
    }
    return all_out ? BoxRelation::Outside : BoxRelation::Unknown;
  }
  bool has_polygons() const override {
    for (const auto& p : parts)
      if (!p->has_polygons()) return false;
    return !parts.empty();
  }
  void collect_polygons(std::vector<std::vector<Vec>>& out) const override {
    for (const auto& p : parts) p->collect_polygons(out);
  }
  std::string kind() const override { return "union"; }
};

struct IntersectionNode final : RegionNode {
  std::vector<std::shared_ptr<const RegionNode>> parts;

  bool contains(const Vec& x) const override {
    for (const auto& p : parts)
      if (!p->contains(x)) return false;
    return true;
  }
  BoxRelation relation(const std::vector<Vec>& pts) const override {
    bool all_in = true;
    for (const auto& p : parts) {
      BoxRelation r = p->relation(pts);
      if (r == BoxRelation::Outside) return BoxRelation::Outside;
      if (r != BoxRelation::Inside) all_in = false;
    }
    return all_in ? BoxRelation::Inside : BoxRelation::Unknown;
  }
  std::string kind() const override { return "intersection"; }
};

struct ComplementNode final : RegionNode {
  std::shared_ptr<const RegionNode> inner;

  bool contains(const Vec& x) const override { return !inner->contains(x); }
  BoxRelation relation(const std::vector<Vec>& pts) const override {
    BoxRelation r = inner->relation(pts);
    if (r == BoxRelation::Inside) return BoxRelation::Outside;
    if (r == BoxRelation::Outside) return BoxRelation::Inside;
    return BoxRelation::Unknown;
  }
  std::string kind() const override { return "complement"; }
};

}  // namespace
}  // namespace detail

using detail::RegionNode;

std::vector<Vec> box_corners(const BoundingBox& box) {
  const int d = box.dim();
  std::vector<Vec> out;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec c(d);
    for (int k = 0; k < d; ++k) c(k) = (mask >> k) & 1 ? box.hi(k) : box.lo(k);
    out.push_back(c);
  }
  return out;
}

Region Region::polytope(std::vector<HalfSpace> faces, bool closed) {
  if (faces.empty()) throw ValidationError("a polytope needs at least one face");
  const int d = static_cast<int>(faces.front().normal.size());
  if (d < 1 || d > kMaxDim) throw ValidationError("polytope dimension out of range");
  for (auto& f : faces) {
    if (f.normal.size() != d) throw ValidationError("polytope faces must share one dimension");
    double n = f.normal.norm();
    if (!(n > 0.0)) throw ValidationError("polytope face normal must be nonzero");
    f.normal /= n;
    f.offset /= n;
  }
  auto node = std::make_shared<detail::PolytopeNode>();
  node->dim = d;
  node->closed = closed;
  node->vertices = detail::enumerate_vertices(faces, d);
  node->faces = std::move(faces);
  if (node->vertices.empty()) {
    node->bounds = detail::unbounded_box(d);
  } else {
    BoundingBox b{node->vertices.front(), node->vertices.front()};
    for (const auto& v : node->vertices) {
      b.lo = b.lo.cwiseMin(v);
      b.hi = b.hi.cwiseMax(v);
    }
    // a polytope with vertices may still be unbounded; test recession along axes
    bool bounded = true;
    for (int k = 0; k < d && bounded; ++k)
      for (int s = -1; s <= 1 && bounded; s += 2) {
        bool blocked = false;
        for (const auto& f : node->faces)
          if (s * f.normal(k) > 1e-12) blocked = true;
        if (!blocked) bounded = false;
      }
    node->bounds = bounded ? b : detail::unbounded_box(d);
  }
  return Region(node);
}

Region Region::box(const Vec& lo, const Vec& hi, bool closed) {
  if (lo.size() != hi.size()) throw ValidationError("box corners must share one dimension");
  if ((hi.array() <= lo.array()).any()) throw ValidationError("box must have positive extent in every axis");
  const int d = static_cast<int>(lo.size());
  std::vector<HalfSpace> faces;
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e(k) = 1.0;
    faces.push_back({e, hi(k)});
    faces.push_back({-e, -lo(k)});
  }
  return polytope(std::move(faces), closed);
}

Region Region::convex_polygon(const std::vector<Vec>& vertices, bool closed) {
  if (vertices.size() < 3) throw ValidationError("a polygon needs at least 3 vertices");
  for (const auto& v : vertices)
    if (v.size() != 2) throw ValidationError("polygon vertices must be planar");
  double area2 = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = vertices[i];
    const Vec& b = vertices[(i + 1) % n];
    area2 += a(0) * b(1) - a(1) * b(0);
  }
  if (std::abs(area2) < 1e-15) throw ValidationError("polygon is degenerate (zero area)");
  const double orient = area2 > 0 ? 1.0 : -1.0;
  std::vector<HalfSpace> faces;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = vertices[i];
    const Vec& b = vertices[(i + 1) % n];
    Vec normal(2);
    normal << orient * (b(1) - a(1)), -orient * (b(0) - a(0));
    double len = normal.norm();
    if (len < 1e-15) throw ValidationError("polygon has repeated vertices");
    normal /= len;
    faces.push_back({normal, normal.dot(a)});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& f : faces)
      if (f.normal.dot(vertices[i]) > f.offset + 1e-9) throw ValidationError("polygon is not convex");
  auto node = std::make_shared<detail::PolytopeNode>();
  node->dim = 2;
  node->closed = closed;
  node->faces = std::move(faces);
  node->vertices = vertices;
  BoundingBox b{vertices.front(), vertices.front()};
  for (const auto& v : vertices) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  node->bounds = b;
  return Region(node);
}

Region Region::unite(std::vector<Region> parts) {
  if (parts.empty()) throw ValidationError("a union needs at least one part");
  auto node = std::make_shared<detail::UnionNode>();
  node->dim = parts.front().dim();
  node->bounds = BoundingBox::of_empty(node->dim);
  for (const auto& p : parts) {
    if (p.dim() != node->dim) throw ValidationError("union parts must share one dimension");
    node->bounds = box_union(node->bounds, p.bounds());
    node->parts.push_back(p.node_);
  }
  return Region(node);
}

Region Region::intersect(std::vector<Region> parts) {
  if (parts.empty()) throw ValidationError("an intersection needs at least one part");
  auto node = std::make_shared<detail::IntersectionNode>();
  node->dim = parts.front().dim();
  node->bounds = detail::unbounded_box(node->dim);
  for (const auto& p : parts) {
    if (p.dim() != node->dim) throw ValidationError("intersection parts must share one dimension");
    node->bounds = box_intersection(node->bounds, p.bounds());
    node->parts.push_back(p.node_);
  }
  return Region(node);
}

Region Region::complement() const {
  auto node = std::make_shared<detail::ComplementNode>();
  node->dim = dim();
  node->bounds = detail::unbounded_box(dim());
  node->inner = node_;
  return Region(node);
}

Region Region::image(const Similarity& map) const {
  if (map.dim() != dim()) throw ValidationError("image map dimension does not match region");
  auto node = std::make_shared<detail::ImageNode>();
  node->dim = dim();
  node->map = map;
  node->inner = node_;
  if (is_bounded()) {
    BoundingBox b = BoundingBox::of_empty(dim());
    for (const auto& c : box_corners(bounds())) {
      Vec y = map.apply(c);
      b = box_union(b, BoundingBox{y, y});
    }
    node->bounds = b;
  } else {
    node->bounds = detail::unbounded_box(dim());
  }
  return Region(node);
}

int Region::dim() const { return node_->dim; }
bool Region::contains(const Vec& x) const {
  if (x.size() != dim()) throw ValidationError("point dimension does not match region");
  return node_->contains(x);
}

bool Region::contains_robustly(const Vec& x, double tol) const {
  if (!contains(x)) return false;
  Vec y = x;
  for (int k = 0; k < dim(); ++k) {
    for (double s : {-tol, tol}) {
      y(k) = x(k) + s;
      if (!node_->contains(y)) return false;
    }
    y(k) = x(k);
  }
  return true;
}

bool Region::excludes_robustly(const Vec& x, double tol) const {
  if (contains(x)) return false;
  Vec y = x;
  for (int k = 0; k < dim(); ++k) {
    for (double s : {-tol, tol}) {
      y(k) = x(k) + s;
      if (node_->contains(y)) return false;
    }
    y(k) = x(k);
  }
  return true;
}

BoxRelation Region::relation(const std::vector<Vec>& hull_points) const { return node_->relation(hull_points); }
BoxRelation Region::relation(const BoundingBox& box) const { return node_->relation(box_corners(box)); }

const BoundingBox& Region::bounds() const { return node_->bounds; }
bool Region::is_bounded() const {
  const auto& b = node_->bounds;
  return b.lo.allFinite() && b.hi.allFinite();
}

bool Region::has_polygons() const { return node_->has_polygons(); }
std::vector<std::vector<Vec>> Region::polygons() const {
  std::vector<std::vector<Vec>> out;
  node_->collect_polygons(out);
  return out;
}

std::string Region::kind() const { return node_->kind(); }

GammaRegion::GammaRegion(const IteratedFunctionSystem& ifs, Region open_set) : open_set_(std::move(open_set)) {
  if (open_set_.dim() != ifs.dim()) throw ValidationError("open set dimension does not match the IFS");
  if (!open_set_.is_bounded()) throw ValidationError("open set must be bounded");
  if (open_set_.bounds().empty()) throw ValidationError("open set is empty");
  for (const auto& m : ifs.maps()) images_.push_back(open_set_.image(m));
}

bool GammaRegion::contains(const Vec& x) const {
  if (!open_set_.contains(x)) return false;
  for (const auto& im : images_)
    if (im.contains(x)) return false;
  return true;
}

BoxRelation GammaRegion::relation(const BoundingBox& box) const {
  auto corners = box_corners(box);
  BoxRelation o = open_set_.relation(corners);
  if (o == BoxRelation::Outside) return BoxRelation::Outside;
  bool all_out = true;
  for (const auto& im : images_) {
    BoxRelation r = im.relation(corners);
    if (r == BoxRelation::Inside) return BoxRelation::Outside;
    if (r != BoxRelation::Outside) all_out = false;
  }
  if (o == BoxRelation::Inside && all_out) return BoxRelation::Inside;
  return BoxRelation::Unknown;
}

Region GammaRegion::as_region() const {
  return Region::intersect({open_set_, Region::unite(images_).complement()});
}

GammaRegion gamma(const IteratedFunctionSystem& ifs, const Region& open_set) {
  return GammaRegion(ifs, open_set);
}

}  // namespace minklab
