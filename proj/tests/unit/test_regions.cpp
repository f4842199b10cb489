#include <cmath>
#include <random>

#include "doctest.h"
#include "minklab/attractor.hpp"
#include "minklab/conditions.hpp"
#include "minklab/errors.hpp"
#include "minklab/region.hpp"
#include "minklab/sampling.hpp"
#include "minklab/scene.hpp"

using namespace minklab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

Vec random_in(std::mt19937_64& rng, const BoundingBox& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(b.dim());
  for (int k = 0; k < b.dim(); ++k) x(k) = b.lo(k) + (b.hi(k) - b.lo(k)) * u(rng);
  return x;
}

}  // namespace

TEST_SUITE("regions") {
  TEST_CASE("primitive membership is strict for open regions") {
    const Region sq = Region::box(v2(0, 0), v2(1, 1));
    CHECK(sq.contains(v2(0.5, 0.5)));
    CHECK_FALSE(sq.contains(v2(1.0, 0.5)));
    CHECK(Region::box(v2(0, 0), v2(1, 1), true).contains(v2(1.0, 0.5)));
    const Region tri = Region::convex_polygon({v2(0, 0), v2(0, 1), v2(1, 0)});
    CHECK(tri.contains(v2(0.2, 0.2)));
    CHECK_FALSE(tri.contains(v2(0.6, 0.6)));
    const Region u = Region::unite({sq, Region::box(v2(2, 0), v2(3, 1))});
    CHECK(u.contains(v2(2.5, 0.5)));
    CHECK_FALSE(u.contains(v2(1.5, 0.5)));
    CHECK(u.complement().contains(v2(1.5, 0.5)));
    CHECK(u.bounds().hi(0) == 3.0);
  }

  TEST_CASE("image membership equals membership of the preimage") {
    const Region tri = Region::convex_polygon({v2(0, 0), v2(1, 0), v2(0.3, 0.8)});
    const Similarity T = Similarity::planar(0.6, 37.0, 0.2, -0.1);
    const Region img = tri.image(T);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int i = 0; i < 20000; ++i) {
      const Vec x = v2(u(rng), u(rng));
      CHECK(img.contains(x) == tri.contains(T.apply_inverse(x)));
    }
  }

  TEST_CASE("gamma membership examples") {
    const Scene s = corpus_scene("gasket-hull");
    const GammaRegion G = gamma(s.ifs, s.open_set);
    CHECK(G.contains(v2(0.5, 0.35)));
    CHECK_FALSE(G.contains(v2(0.25, 0.1)));
    CHECK(G.images()[0].contains(v2(0.25, 0.1)));
    const Scene sq = corpus_scene("square-r3");
    CHECK(gamma(sq.ifs, sq.open_set).contains(v3(0.5, 0.5, 0.4)));
    CHECK(gamma(sq.ifs, sq.open_set).contains(v3(0.5, 0.5, 0.2)));
    CHECK_FALSE(gamma(sq.ifs, sq.open_set).contains(v3(0.25, 0.25, 0.2)));
  }

  TEST_CASE("gamma membership implies O and no first-level image") {
    for (const char* name : {"gasket-hull", "gasket-central", "koch-hull", "carpet-hull"}) {
      const Scene s = corpus_scene(name);
      const GammaRegion G = gamma(s.ifs, s.open_set);
      std::mt19937_64 rng(6);
      int hits = 0;
      for (int i = 0; i < 100000; ++i) {
        const Vec x = random_in(rng, s.open_set.bounds());
        if (!G.contains(x)) continue;
        ++hits;
        REQUIRE(s.open_set.contains(x));
        for (const auto& img : G.images()) REQUIRE_FALSE(img.contains(x));
      }
      CHECK(hits > 0);
    }
  }

  TEST_CASE("trivial attractor leaves a null gamma") {
    const Scene s = corpus_scene("square-full");
    const GammaRegion G = gamma(s.ifs, s.open_set);
    QmcSequence seq(2, kDefaultSeed);
    const std::size_t n = 100000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += G.contains(seq.point_in(i, s.open_set.bounds())) ? 1 : 0;
    // Γ is a union of segments here, so no sample may land in it.
    CHECK(hits == 0);
  }

  TEST_CASE("first-level volume additivity and nesting") {
    for (const char* name : {"gasket-hull", "gasket-central", "carpet-hull", "square-r3"}) {
      const Scene s = corpus_scene(name);
      const GammaRegion G = gamma(s.ifs, s.open_set);
      const int d = s.dim();
      double sum_rd = 0.0;
      for (double r : s.ifs.ratios()) sum_rd += std::pow(r, d);
      QmcSequence seq(d, 99);
      const std::size_t n = 200000;
      std::size_t in_O = 0, in_G = 0, escaped = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec x = seq.point_in(i, s.open_set.bounds());
        if (!s.open_set.contains(x)) {
          for (const auto& img : G.images()) escaped += img.contains(x) ? 1 : 0;
          continue;
        }
        ++in_O;
        in_G += G.contains(x) ? 1 : 0;
      }
      const double frac = static_cast<double>(in_G) / in_O;
      const double expect = 1.0 - sum_rd;
      const double sigma = std::sqrt(expect * (1 - expect) / in_O);
      CHECK(std::abs(frac - expect) <= 3 * sigma + 1e-3);
      CHECK(escaped == 0);
    }
  }

  TEST_CASE("open set condition reports") {
    SamplingOptions opt;
    opt.n_samples = 4000;
    for (const char* ok : {"gasket-hull", "square-r3", "koch-hull", "carpet-hull", "gasket-central"}) {
      const Scene s = corpus_scene(ok);
      CHECK(check_osc(s.ifs, s.open_set, opt).verdict == Verdict::NoViolationFound);
    }
    const Scene disk = corpus_scene("gasket-disk");
    const ConditionReport rep = check_osc(disk.ifs, disk.open_set, opt);
    REQUIRE(rep.verdict == Verdict::Fail);
    REQUIRE(rep.counterexample);
    REQUIRE(rep.map_index);
    const Vec& w = *rep.counterexample;
    CHECK(osc_violated_at(disk.ifs, disk.open_set, *rep.map_index, w, opt.tol));
    const GammaRegion G = gamma(disk.ifs, disk.open_set);
    int covering = 0;
    for (const auto& img : G.images()) covering += img.contains(w) ? 1 : 0;
    CHECK(covering >= 2);
    const ConditionReport again = check_osc(disk.ifs, disk.open_set, opt);
    CHECK(again.sample_index == rep.sample_index);
    CHECK((*again.counterexample - w).norm() == 0.0);
  }

  TEST_CASE("strong open set condition") {
    const Scene s = corpus_scene("gasket-hull");
    const Attractor A(s.ifs);
    CHECK(check_sosc(A, s.open_set, 1e-3).verdict == Verdict::Pass);
    Similarity far = Similarity::scaling(0.999999, v2(10, 10));
    CHECK(check_sosc(A, s.open_set.image(far), 1e-3).verdict == Verdict::Fail);
    const Scene sq = corpus_scene("square-r3");
    const ConditionReport rep = check_sosc(Attractor(sq.ifs), sq.open_set, 1e-3);
    REQUIRE(rep.verdict == Verdict::Pass);
    REQUIRE(rep.counterexample);
    CHECK(sq.open_set.contains(*rep.counterexample));
    CHECK(std::abs((*rep.counterexample)(2)) < 1e-12);
  }

  TEST_CASE("projection condition") {
    SamplingOptions opt;
    opt.n_samples = 300;
    opt.tol = 1e-6;
    for (const char* ok : {"gasket-central", "koch-hull", "gasket-hull"}) {
      const Scene s = corpus_scene(ok);
      CHECK(check_projection_condition(Attractor(s.ifs), s.open_set, opt).verdict == Verdict::NoViolationFound);
    }
    const Scene sk = corpus_scene("gasket-skewed");
    const Attractor A(sk.ifs);
    const ConditionReport rep = check_projection_condition(A, sk.open_set, opt);
    REQUIRE(rep.verdict == Verdict::Fail);
    REQUIRE(rep.counterexample);
    const Vec& x = *rep.counterexample;
    CHECK(projection_violated_at(A, *rep.map_index, x, opt.tol));
    CHECK(A.distance_to_piece(*rep.map_index, x, 1e-9) > A.distance(x, 1e-9) + opt.tol);
  }

  TEST_CASE("estimate_g") {
    const Scene c = corpus_scene("gasket-central");
    const GEstimate g = estimate_g(Attractor(c.ifs), gamma(c.ifs, c.open_set), 1e-7);
    CHECK(std::abs(g.value - std::sqrt(3.0) / 6) <= 1e-7);
    CHECK(g.upper - g.lower <= 1e-7);
    CHECK(g.lower <= std::sqrt(3.0) / 6 + 1e-12);
    CHECK(g.upper >= std::sqrt(3.0) / 6 - 1e-12);
    // The witness is a point of Γ whose distance certifies the lower bound.
    const Attractor A(c.ifs);
    CHECK(A.distance(g.witness, 1e-12) >= g.lower - 1e-9);
    const Scene sq = corpus_scene("square-r3");
    const GEstimate g3 = estimate_g(Attractor(sq.ifs), gamma(sq.ifs, sq.open_set), 1e-3);
    CHECK(std::abs(g3.value - 0.5) <= 1e-3);
    const Scene full = corpus_scene("square-full");
    CHECK_THROWS_AS(estimate_g(Attractor(full.ifs), gamma(full.ifs, full.open_set), 1e-3), DegenerateRegionError);
  }

  TEST_CASE("tiles") {
    const Scene s = corpus_scene("gasket-hull");
    const GammaRegion G = gamma(s.ifs, s.open_set);
    CHECK(tiles(s.ifs, G, 0).size() == 1);
    const auto t = tiles(s.ifs, G, 2);
    CHECK(t.size() == 13);
    CHECK(t[0].word.empty());
    CHECK(t[12].word == Word{2, 2});
    std::mt19937_64 rng(8);
    int hits = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vec x = random_in(rng, s.open_set.bounds());
      int count = 0;
      for (const auto& tile : t) count += tile.region.contains(x) ? 1 : 0;
      CHECK(count <= 1);
      hits += count;
    }
    CHECK(hits > 0);
  }
}
