#include "minklab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "minklab/errors.hpp"
#include "minklab/parallel.hpp"

namespace minklab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NoViolationFound: return "no-violation-found";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kChunk = 1024;

struct StreamOutcome {
  std::size_t accepted = 0;
  std::uint64_t attempts = 0;
  std::optional<std::uint64_t> fail_index;
  std::optional<Vec> fail_point;
};

struct ChunkOutcome {
  std::size_t accepted = 0;
  std::size_t accepted_before_fail = 0;
  std::optional<std::uint64_t> fail_index;
  std::optional<Vec> fail_point;
};

// Scans attempts in stream order, accepting points inside `region`, and
// reports the first failing attempt among the first n accepted points.
StreamOutcome scan_stream(const QmcSequence& seq, const Region& region, std::size_t n, std::size_t attempts_per,
                          const std::function<bool(const Vec&)>& fails) {
  const BoundingBox box = region.bounds();
  if (!region.is_bounded() || box.empty()) throw DegenerateRegionError("cannot sample an unbounded or empty region");
  const std::uint64_t max_attempts = static_cast<std::uint64_t>(n) * attempts_per;
  StreamOutcome out;
  const std::size_t round = static_cast<std::size_t>(std::max(1, thread_limit())) * 4;
  std::uint64_t next_chunk = 0;
  while (out.accepted < n) {
    if (out.attempts >= max_attempts)
      throw DegenerateRegionError("rejection sampling starved after " + std::to_string(out.attempts) +
                                  " attempts (" + std::to_string(out.accepted) +
                                  " accepted); the region has numerically zero measure");
    std::vector<ChunkOutcome> res(round);
    parallel_chunks(round, [&](std::size_t c) {
      const std::uint64_t start = (next_chunk + c) * kChunk;
      ChunkOutcome& r = res[c];
      for (std::uint64_t k = start; k < start + kChunk; ++k) {
        Vec x = seq.point_in(k, box);
        if (!region.contains(x)) continue;
        if (!r.fail_index && fails(x)) {
          r.fail_index = k;
          r.fail_point = x;
          r.accepted_before_fail = r.accepted;
        }
        ++r.accepted;
      }
    });
    for (const auto& r : res) {
      if (out.accepted >= n) break;
      if (r.fail_index && out.accepted + r.accepted_before_fail < n) {
        out.fail_index = r.fail_index;
        out.fail_point = r.fail_point;
        out.accepted += r.accepted_before_fail + 1;
        out.attempts = *r.fail_index + 1;
        return out;
      }
      out.accepted += r.accepted;
      out.attempts += kChunk;
    }
    next_chunk += round;
  }
  out.accepted = std::min(out.accepted, n);
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, int i) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
}

}  // namespace

bool osc_violated_at(const IteratedFunctionSystem& ifs, const Region& open_set, int map_index, const Vec& x,
                     double tol) {
  for (int j = 0; j < ifs.size(); ++j) {
    if (j == map_index) continue;
    if (open_set.image(ifs.map(j)).contains_robustly(x, tol)) return true;
  }
  return open_set.excludes_robustly(x, tol);
}

ConditionReport check_osc(const IteratedFunctionSystem& ifs, const Region& open_set, const SamplingOptions& opt) {
  ConditionReport rep;
  rep.condition = "open-set-condition";
  rep.tolerance = opt.tol;
  std::vector<Region> images;
  for (const auto& m : ifs.maps()) images.push_back(open_set.image(m));
  for (int i = 0; i < ifs.size(); ++i) {
    QmcSequence seq(ifs.dim(), stream_seed(opt.seed, i));
    auto fails = [&](const Vec& x) {
      for (int j = 0; j < ifs.size(); ++j)
        if (j != i && images[static_cast<std::size_t>(j)].contains_robustly(x, opt.tol)) return true;
      return open_set.excludes_robustly(x, opt.tol);
    };
    StreamOutcome s = scan_stream(seq, images[static_cast<std::size_t>(i)], opt.n_samples, opt.attempts_per_sample,
                                  fails);
    rep.samples_used += s.accepted;
    if (s.fail_index) {
      rep.verdict = Verdict::Fail;
      rep.counterexample = s.fail_point;
      rep.map_index = i;
      rep.sample_index = s.fail_index;
      int other = -1;
      for (int j = 0; j < ifs.size(); ++j)
        if (j != i && images[static_cast<std::size_t>(j)].contains_robustly(*s.fail_point, opt.tol)) {
          other = j;
          break;
        }
      rep.detail = other >= 0 ? "point of S_" + std::to_string(i) + "O lies in S_" + std::to_string(other) + "O"
                              : "point of S_" + std::to_string(i) + "O lies outside O";
      return rep;
    }
  }
  rep.verdict = Verdict::NoViolationFound;
  rep.detail = "no overlap or escape among sampled points";
  return rep;
}

ConditionReport check_sosc(const Attractor& attractor, const Region& open_set, double tol) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  ConditionReport rep;
  rep.condition = "strong-open-set-condition";
  rep.tolerance = tol;
  double delta = 2.0 * attractor.ball().radius;
  for (;;) {
    auto pts = attractor.points(delta);
    rep.samples_used += pts.size();
    for (const auto& p : pts)
      if (open_set.contains(p)) {
        rep.verdict = Verdict::Pass;
        rep.counterexample = p;
        rep.detail = "attractor point inside O";
        return rep;
      }
    if (delta <= tol) break;
    delta = std::max(tol, 0.5 * delta);
  }
  rep.verdict = Verdict::Fail;
  rep.detail = "no attractor point of the cover lies in O";
  return rep;
}

bool projection_violated_at(const Attractor& attractor, int map_index, const Vec& x, double tol) {
  const double q = 0.25 * tol;
  DistanceBracket all = attractor.bracket(x, q);
  DistanceBracket piece =
      attractor.bracket(x, q, std::numeric_limits<double>::infinity(), &attractor.ifs().map(map_index));
  return piece.lower > all.upper + tol;
}

ConditionReport check_projection_condition(const Attractor& attractor, const Region& open_set,
                                           const SamplingOptions& opt) {
  ConditionReport rep;
  rep.condition = "projection-condition";
  rep.tolerance = opt.tol;
  const auto& ifs = attractor.ifs();
  for (int i = 0; i < ifs.size(); ++i) {
    Region image = open_set.image(ifs.map(i));
    QmcSequence seq(ifs.dim(), stream_seed(opt.seed, 1000 + i));
    auto fails = [&](const Vec& x) { return projection_violated_at(attractor, i, x, opt.tol); };
    StreamOutcome s = scan_stream(seq, image, opt.n_samples, opt.attempts_per_sample, fails);
    rep.samples_used += s.accepted;
    if (s.fail_index) {
      rep.verdict = Verdict::Fail;
      rep.counterexample = s.fail_point;
      rep.map_index = i;
      rep.sample_index = s.fail_index;
      const double q = 0.25 * opt.tol;
      rep.detail = "d(x,S_" + std::to_string(i) + "F) = " + std::to_string(attractor.distance_to_piece(i, *s.fail_point, q)) +
                   " exceeds d(x,F) = " + std::to_string(attractor.distance(*s.fail_point, q));
      return rep;
    }
  }
  rep.verdict = Verdict::NoViolationFound;
  rep.detail = "nearest attractor points of sampled x in S_iO lie in S_iF";
  return rep;
}

namespace {

struct Cell {
  BoundingBox box;
  double upper;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.upper < b.upper; }
};

}  // namespace

GEstimate estimate_g(const Attractor& attractor, const GammaRegion& gr, double tol, std::size_t max_cells) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  const int d = gr.dim();
  const double q = 0.25 * tol;
  const double min_radius = tol / 64.0;
  const double coarse_radius = 0.5 * (gr.bounds().hi - gr.bounds().lo).norm() / 16.0;
  GEstimate est;
  bool found = false;
  double dropped = 0.0;
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;

  auto visit = [&](const BoundingBox& box) {
    if (gr.relation(box) == BoxRelation::Outside) return;
    Vec c = 0.5 * (box.lo + box.hi);
    const double radius = 0.5 * (box.hi - box.lo).norm();
    const std::vector<Vec> corners = box_corners(box);
    std::vector<Vec> probes;
    if (radius > coarse_radius) probes = corners;
    probes.push_back(c);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Vec& p = probes[i];
      DistanceBracket b = attractor.bracket(p, q);
      if (i + 1 == probes.size()) bound = std::min(bound, b.upper + radius);
      // |x - w| is convex in x, so its maximum over the box sits at a corner
      double far = 0.0;
      for (const auto& k : corners) far = std::max(far, (k - b.witness).norm());
      bound = std::min(bound, far);
      if (!gr.contains(p)) continue;
      if (!found || b.lower > est.lower) {
        est.lower = b.lower;
        est.witness = p;
        found = true;
      }
    }
    heap.push({box, bound});
    ++est.cells;
  };

  visit(gr.bounds());
  while (!heap.empty()) {
    Cell top = heap.top();
    if (found && top.upper <= est.lower + tol) break;
    heap.pop();
    const double radius = 0.5 * (top.box.hi - top.box.lo).norm();
    if (radius < min_radius) {
      dropped = std::max(dropped, top.upper);
      continue;
    }
    if (est.cells > max_cells) throw CapacityError("estimate_g exceeded the cell cap of " + std::to_string(max_cells));
    Vec mid = 0.5 * (top.box.lo + top.box.hi);
    for (int mask = 0; mask < (1 << d); ++mask) {
      BoundingBox child{top.box.lo, top.box.hi};
      for (int k = 0; k < d; ++k) {
        if ((mask >> k) & 1) child.lo(k) = mid(k);
        else child.hi(k) = mid(k);
      }
      visit(child);
    }
  }
  if (!found) throw DegenerateRegionError("no point of Γ was found; Γ is empty or has measure zero");
  double upper = heap.empty() ? est.lower : std::max(est.lower, heap.top().upper);
  if (dropped > upper && dropped > est.lower + tol) upper = dropped;
  est.upper = std::max(upper, est.lower);
  if (est.upper <= tol) throw DegenerateRegionError("Γ lies within the tolerance of F; it is empty or has measure zero");
  est.value = est.lower;
  return est;
}

std::vector<Tile> tiles(const IteratedFunctionSystem& ifs, const GammaRegion& gr, int max_depth) {
  if (max_depth < 0) throw ValidationError("tile depth must be nonnegative");
  const Region base = gr.as_region();
  std::vector<Tile> out;
  std::vector<std::pair<Word, Similarity>> level{{Word{}, Similarity::identity(ifs.dim())}};
  for (int depth = 0; depth <= max_depth; ++depth) {
    std::vector<std::pair<Word, Similarity>> next;
    for (auto& [w, s] : level) {
      out.push_back({w, s.is_identity() ? base : base.image(s)});
      if (depth < max_depth)
        for (int i = 0; i < ifs.size(); ++i) {
          Word c = w;
          c.push_back(i);
          next.emplace_back(std::move(c), s.compose(ifs.map(i)));
        }
    }
    level = std::move(next);
  }
  return out;
}

}  // namespace minklab
