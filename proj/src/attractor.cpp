#include "minklab/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "minklab/errors.hpp"

namespace minklab {
namespace {

struct Node {
  double lower;
  double ratio;
  Mat q;
  Vec b;
  bool pure;

  Vec apply(const Vec& y) const {
    if (pure) return ratio * y + b;
    return ratio * (q * y) + b;
  }
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const { return a.lower > b.lower; }
};

Node node_from(const Similarity& s) {
  return Node{0.0, s.ratio(), s.orthogonal(), s.translation(), s.is_pure_scaling()};
}

Node child_of(const Node& w, const Similarity& si) {
  Node c;
  c.ratio = w.ratio * si.ratio();
  c.pure = w.pure && si.is_pure_scaling();
  if (c.pure) {
    c.q = w.q;
    c.b = w.ratio * si.translation() + w.b;
  } else {
    c.q = w.q * si.orthogonal();
    c.b = w.ratio * (w.q * si.translation()) + w.b;
  }
  return c;
}

}  // namespace

Attractor::Attractor(IteratedFunctionSystem ifs) : ifs_(std::move(ifs)) {
  const int n = ifs_.size();
  const int d = ifs_.dim();
  Vec c = Vec::Zero(d);
  std::vector<Vec> fixed;
  for (int i = 0; i < n; ++i) {
    fixed.push_back(ifs_.map(i).fixed_point());
    c += fixed.back();
  }
  c /= static_cast<double>(n);
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& m = ifs_.map(i);
    radius = std::max(radius, (m.apply(c) - c).norm() / (1.0 - m.ratio()));
  }
  ball_ = {c, radius};
  anchor_ = fixed.front();
  // Search for a finite vertex set V ⊂ F whose hull is mapped into itself.
  const double eps = 1e-12 * std::max(1.0, radius);
  auto prune = [&](std::vector<Vec> pts) {
    std::vector<Vec> keep;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::vector<Vec> others;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (j != k && !(j < k && (pts[j] - pts[k]).norm() <= eps)) others.push_back(pts[j]);
      bool dup = false;
      for (const auto& q : keep)
        if ((q - pts[k]).norm() <= eps) dup = true;
      if (dup) continue;
      if (others.empty() || hull_distance_bounds(others, pts[k]).second > eps) keep.push_back(pts[k]);
    }
    return keep;
  };
  std::vector<Vec> verts = prune(fixed);
  for (int round = 0; round < 8 && !verts.empty(); ++round) {
    std::vector<Vec> extra;
    for (const auto& m : ifs_.maps())
      for (const auto& v : verts) {
        Vec y = m.apply(v);
        if (hull_distance_bounds(verts, y).second > eps) extra.push_back(y);
      }
    if (extra.empty()) {
      hull_ = verts;
      break;
    }
    verts.insert(verts.end(), extra.begin(), extra.end());
    verts = prune(verts);
    if (verts.size() > 64) break;
  }
}

std::pair<double, double> hull_distance_bounds(const std::vector<Vec>& pts, const Vec& y) {
  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim + 2, kMaxDim + 2>;
  using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim + 2, 1>;
  const std::size_t m = pts.size();
  thread_local std::vector<Vec> p;
  p.resize(m);
  double scale = 0.0;
  std::size_t j0 = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    p[j] = pts[j] - y;
    const double nn = p[j].squaredNorm();
    scale = std::max(scale, nn);
    if (nn < best_norm) {
      best_norm = nn;
      j0 = j;
    }
  }
  std::vector<std::size_t> corral{j0};
  std::vector<double> lambda{1.0};
  Vec x = p[j0];
  const double gap_tol = 1e-13 * std::max(scale, 1e-300);
  double lower = 0.0;
  for (int iter = 0; iter < 64; ++iter) {
    const double xx = x.squaredNorm();
    if (xx <= 1e-300) return {0.0, 0.0};
    std::size_t jmin = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double v = x.dot(p[j]);
      if (v < dmin) {
        dmin = v;
        jmin = j;
      }
    }
    lower = std::max(lower, std::max(0.0, dmin) / std::sqrt(xx));
    if (xx - dmin <= gap_tol) break;
    if (std::find(corral.begin(), corral.end(), jmin) != corral.end()) break;
    if (corral.size() >= static_cast<std::size_t>(y.size()) + 1) break;
    corral.push_back(jmin);
    lambda.push_back(0.0);
    for (int minor = 0; minor < 16; ++minor) {
      const auto k = static_cast<Eigen::Index>(corral.size());
      Small a(k + 1, k + 1);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c)
          a(r, c) = p[corral[static_cast<std::size_t>(r)]].dot(p[corral[static_cast<std::size_t>(c)]]);
        a(r, k) = 1.0;
        a(k, r) = 1.0;
      }
      a(k, k) = 0.0;
      SmallVec rhs = SmallVec::Zero(k + 1);
      rhs(k) = 1.0;
      SmallVec sol = a.fullPivLu().solve(rhs);
      bool interior = sol.allFinite();
      for (Eigen::Index r = 0; r < k && interior; ++r)
        if (sol(r) <= 1e-14) interior = false;
      if (interior) {
        for (Eigen::Index r = 0; r < k; ++r) lambda[static_cast<std::size_t>(r)] = sol(r);
        break;
      }
      if (!sol.allFinite()) {
        corral.pop_back();
        lambda.pop_back();
        break;
      }
      double theta = 1.0;
      for (Eigen::Index r = 0; r < k; ++r) {
        const double lr = lambda[static_cast<std::size_t>(r)];
        if (sol(r) <= 1e-14 && lr - sol(r) > 0.0) theta = std::min(theta, lr / (lr - sol(r)));
      }
      for (Eigen::Index r = 0; r < k; ++r) {
        auto& lr = lambda[static_cast<std::size_t>(r)];
        lr = theta * sol(r) + (1.0 - theta) * lr;
      }
      std::vector<std::size_t> nc;
      std::vector<double> nl;
      for (std::size_t r = 0; r < corral.size(); ++r)
        if (lambda[r] > 1e-14) {
          nc.push_back(corral[r]);
          nl.push_back(lambda[r]);
        }
      if (nc.empty()) {
        nc.push_back(corral.back());
        nl.push_back(1.0);
      }
      double total = 0.0;
      for (double v : nl) total += v;
      for (double& v : nl) v /= total;
      corral = std::move(nc);
      lambda = std::move(nl);
    }
    x = Vec::Zero(y.size());
    for (std::size_t r = 0; r < corral.size(); ++r) x += lambda[r] * p[corral[r]];
  }
  const double xx = x.squaredNorm();
  if (xx > 1e-300) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) dmin = std::min(dmin, x.dot(p[j]));
    lower = std::max(lower, std::max(0.0, dmin) / std::sqrt(xx));
  }
  return {std::min(lower, std::sqrt(xx)), std::sqrt(xx)};
}

std::vector<Vec> Attractor::points(double delta, std::size_t cap) const {
  return points(anchor_, delta, cap);
}

std::vector<Vec> Attractor::points(const Vec& seed, double delta, std::size_t cap) const {
  if (!(delta > 0.0)) throw ValidationError("resolution must be positive");
  if (seed.size() != dim()) throw ValidationError("seed dimension mismatch");
  const double diam = 2.0 * ball_.radius;
  std::vector<Vec> out;
  if (diam <= delta) {
    out.push_back(seed);
    return out;
  }
  std::vector<Node> stack;
  stack.push_back(node_from(Similarity::identity(dim())));
  while (!stack.empty()) {
    Node w = std::move(stack.back());
    stack.pop_back();
    for (int i = ifs_.size() - 1; i >= 0; --i) {
      Node c = child_of(w, ifs_.map(i));
      if (c.ratio * diam <= delta) {
        if (out.size() >= cap)
          throw CapacityError("attractor point count exceeds cap of " + std::to_string(cap) +
                              "; increase the resolution");
        out.push_back(c.apply(seed));
      } else {
        stack.push_back(std::move(c));
      }
    }
  }
  // depth-first traversal above emits children in reverse; restore word order
  std::reverse(out.begin(), out.end());
  return out;
}

DistanceBracket Attractor::bracket(const Vec& x, double tol, double cutoff, const Similarity* root) const {
  if (!(tol > 0.0)) throw ValidationError("distance tolerance must be positive");
  if (x.size() != dim()) throw ValidationError("query point dimension mismatch");
  thread_local std::vector<Node> heap;
  heap.clear();
  const double radius = ball_.radius;
  const bool use_hull = !hull_.empty();
  DistanceBracket best;
  best.upper = std::numeric_limits<double>::infinity();

  // Lower bound for the subtree of node c; updates the upper bound.
  auto bound = [&](const Node& c) {
    double lb = (x - c.apply(ball_.center)).norm() - c.ratio * radius;
    if (use_hull) {
      Vec y = c.pure ? Vec((x - c.b) / c.ratio) : Vec(c.q.transpose() * (x - c.b) / c.ratio);
      lb = std::max(lb, c.ratio * hull_distance_bounds(hull_, y).first);
      for (const auto& v : hull_) {
        const double u = c.ratio * (y - v).norm();
        if (u < best.upper) {
          best.upper = u;
          best.witness = c.apply(v);
        }
      }
    } else {
      Vec a = c.apply(anchor_);
      const double u = (x - a).norm();
      if (u < best.upper) {
        best.upper = u;
        best.witness = a;
      }
    }
    return std::max(0.0, lb);
  };

  Node start = node_from(root ? *root : Similarity::identity(dim()));
  start.lower = bound(start);
  heap.push_back(std::move(start));
  NodeOrder order;
  const int n = ifs_.size();
  double pruned = std::numeric_limits<double>::infinity();
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), order);
    Node w = std::move(heap.back());
    heap.pop_back();
    if (w.lower >= best.upper - tol || w.lower > cutoff) {
      best.lower = std::min(w.lower, pruned);
      return best;
    }
    for (int i = 0; i < n; ++i) {
      Node c = child_of(w, ifs_.map(i));
      c.lower = std::max(w.lower, bound(c));
      if (c.lower < best.upper - tol && c.lower <= cutoff) {
        heap.push_back(std::move(c));
        std::push_heap(heap.begin(), heap.end(), order);
      } else {
        pruned = std::min(pruned, c.lower);
      }
    }
  }
  best.lower = std::min(pruned, best.upper);
  return best;
}

double Attractor::distance(const Vec& x, double tol) const {
  DistanceBracket b = bracket(x, tol);
  return 0.5 * (b.lower + b.upper);
}

double Attractor::distance_to_piece(int i, const Vec& x, double tol) const {
  if (i < 0 || i >= ifs_.size()) throw ValidationError("map index out of range");
  DistanceBracket b = bracket(x, tol, std::numeric_limits<double>::infinity(), &ifs_.map(i));
  return 0.5 * (b.lower + b.upper);
}

Vec Attractor::nearest_point(const Vec& x, double tol) const {
  return bracket(x, tol).witness;
}

BoundingBox Attractor::bounding_box(double tol) const {
  auto pts = points(tol);
  BoundingBox box{pts.front(), pts.front()};
  for (const auto& p : pts) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box.inflated(tol);
}

int Attractor::affine_hull_dimension(double tol) const {
  // choose a resolution giving a moderately dense sample
  double delta = 2.0 * ball_.radius;
  std::vector<Vec> pts;
  for (int level = 0; level < 60; ++level) {
    delta *= 0.5;
    auto next = points(delta, 200'000);
    pts = std::move(next);
    if (pts.size() >= 2000) break;
  }
  const int d = dim();
  Vec mean = Vec::Zero(d);
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat cov = Mat::Zero(d, d);
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(cov), Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = ev.maxCoeff();
  if (top == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol * top) ++rank;
  return rank;
}

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)};
}

BoundingBox box_intersection(const BoundingBox& a, const BoundingBox& b) {
  return {a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
}

}  // namespace minklab
