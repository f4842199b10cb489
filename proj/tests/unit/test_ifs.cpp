#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "minklab/attractor.hpp"
#include "minklab/errors.hpp"
#include "minklab/lattice.hpp"
#include "minklab/scene.hpp"
#include "minklab/similarity.hpp"

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

IteratedFunctionSystem gasket() {
  const double h = std::sqrt(3.0) / 4.0;
  return IteratedFunctionSystem({Similarity::planar(0.5, 0, 0, 0), Similarity::planar(0.5, 0, 0.5, 0),
                                 Similarity::planar(0.5, 0, 0.25, h)});
}

double brute_distance(const std::vector<Vec>& pts, const Vec& x) {
  double best = INFINITY;
  for (const auto& p : pts) best = std::min(best, (p - x).norm());
  return best;
}

}  // namespace

TEST_SUITE("ifs_core") {
  TEST_CASE("apply") {
    CHECK((Similarity::planar(0.5, 0, 0, 0).apply(v2(1, 0)) - v2(0.5, 0)).norm() < 1e-15);
    CHECK((gasket().map(1).apply(v2(0, 0)) - v2(0.5, 0)).norm() < 1e-15);
    CHECK((Similarity::planar(0.5, 90, 0, 0).apply(v2(1, 0)) - v2(0, 0.5)).norm() < 1e-15);
    CHECK_THROWS_AS(Similarity::planar(0.5, 0, 0, 0).apply(v3(1, 0, 0)), ValidationError);
  }

  TEST_CASE("similarity invariants are validated") {
    CHECK_THROWS_AS(Similarity::planar(1.0, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(Similarity::planar(0.0, 0, 0, 0), ValidationError);
    Mat skew(2, 2);
    skew << 1, 0.1, 0, 1;
    CHECK_THROWS_AS(Similarity(0.5, skew, v2(0, 0)), ValidationError);
    CHECK_THROWS_AS(IteratedFunctionSystem({Similarity::planar(0.5, 0, 0, 0)}), ValidationError);
    CHECK_THROWS_AS(IteratedFunctionSystem({Similarity::planar(0.5, 0, 0, 0), Similarity::scaling(0.5, v3(0, 0, 0))}),
                    ValidationError);
  }

  TEST_CASE("compose_word") {
    const auto ifs = gasket();
    const Similarity e = ifs.compose_word({});
    CHECK(e.is_identity());
    CHECK(e.ratio() == 1.0);
    CHECK(ifs.compose_word({0, 0}).ratio() == 0.25);
    // S_1(S_2(0)) by two applications.
    const Vec by_hand = ifs.map(0).apply(ifs.map(1).apply(v2(0, 0)));
    CHECK((ifs.compose_word({0, 1}).apply(v2(0, 0)) - v2(0.25, 0)).norm() < 1e-15);
    CHECK((by_hand - v2(0.25, 0)).norm() < 1e-15);
    CHECK_THROWS_AS(ifs.compose_word({3}), ValidationError);
    CHECK_THROWS_AS(ifs.compose_word({-1}), ValidationError);
  }

  TEST_CASE("word ratios are exact products for dyadic ratios") {
    const IteratedFunctionSystem ifs({Similarity::planar(0.5, 0, 0, 0), Similarity::planar(0.25, 0, 0.6, 0),
                                      Similarity::planar(0.125, 0, 0, 0.7)});
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      Word w(rng() % 12);
      double prod = 1.0;
      for (auto& c : w) {
        c = static_cast<int>(rng() % 3);
        prod *= ifs.map(c).ratio();
      }
      CHECK(ifs.compose_word(w).ratio() == prod);
      CHECK(ifs.word_ratio(w) == prod);
    }
  }

  TEST_CASE("similarity_dimension examples") {
    CHECK(std::abs(similarity_dimension({0.5, 0.5, 0.5}) - std::log2(3.0)) <= 1e-12);
    CHECK(std::abs(similarity_dimension({0.5, 0.5, 0.5, 0.5}) - 2.0) <= 1e-12);
    CHECK(std::abs(similarity_dimension({0.5, 0.5}) - 1.0) <= 1e-12);
    // 2^-D + 4^-D = 1 means 2^-D is the reciprocal golden ratio.
    CHECK(std::abs(similarity_dimension({0.5, 0.25}) - std::log2((1 + std::sqrt(5.0)) / 2)) <= 1e-12);
    CHECK_THROWS_AS(similarity_dimension({0.5}), ValidationError);
    CHECK_THROWS_AS(similarity_dimension({0.5, 1.0}), ValidationError);
  }

  TEST_CASE("Moran residual and monotonicity on random ratio tuples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> r(2 + rng() % 8);
      for (auto& x : r) x = u(rng);
      const double D = similarity_dimension(r);
      auto moran = [&](double s) {
        double t = 0;
        for (double x : r) t += std::pow(x, s);
        return t;
      };
      CHECK(std::abs(moran(D) - 1.0) <= 1e-10);
      CHECK(moran(D * 0.999 - 1e-6) > 1.0);
      CHECK(moran(D * 1.001 + 1e-6) < 1.0);
    }
  }

  TEST_CASE("exact integer dimension") {
    CHECK(exact_integer_dimension({Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2)}) == 2);
    CHECK(exact_integer_dimension({Rational(1, 2), Rational(1, 2)}) == 1);
    CHECK_FALSE(exact_integer_dimension({Rational(1, 2), Rational(1, 2), Rational(1, 2)}).has_value());
  }

  TEST_CASE("classify_lattice examples") {
    const auto a = classify_lattice({0.5, 0.5, 0.5}, std::log2(3.0));
    CHECK(a.is_lattice);
    CHECK(a.base == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.exponents == std::vector<int>{1, 1, 1});
    CHECK(a.eta > 0);
    CHECK(a.h == doctest::Approx(std::log(2.0)));
    const auto b = classify_lattice({0.5, 0.25}, similarity_dimension({0.5, 0.25}));
    CHECK(b.is_lattice);
    CHECK(b.base == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.exponents == std::vector<int>{1, 2});
    CHECK_FALSE(classify_lattice({0.5, 1.0 / 3.0}, similarity_dimension({0.5, 1.0 / 3.0})).is_lattice);
  }

  TEST_CASE("classify_lattice recovers minimal bases") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.3, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
      const double r = u(rng);
      std::vector<int> k(2 + rng() % 4);
      for (auto& x : k) x = 1 + static_cast<int>(rng() % 6);
      int g = 0;
      for (int x : k) g = std::gcd(g, x);
      for (auto& x : k) x /= g;
      std::vector<double> ratios;
      for (int x : k) ratios.push_back(std::pow(r, x));
      const auto lat = classify_lattice(ratios, similarity_dimension(ratios));
      REQUIRE(lat.is_lattice);
      CHECK(lat.base == doctest::Approx(r).epsilon(1e-9));
      CHECK(lat.exponents == k);
      int gg = 0;
      for (int x : lat.exponents) gg = std::gcd(gg, x);
      CHECK(gg == 1);
      std::vector<double> again;
      for (int x : lat.exponents) again.push_back(std::pow(lat.base, x));
      const auto lat2 = classify_lattice(again, similarity_dimension(again));
      CHECK(lat2.exponents == lat.exponents);
      CHECK(lat2.base == doctest::Approx(lat.base).epsilon(1e-12));
    }
  }

  TEST_CASE("declared lattices are verified") {
    const std::vector<double> r{0.5, 0.25};
    const double D = similarity_dimension(r);
    const auto ok = verify_lattice(r, D, 0.5, {1, 2}, Rational(1, 2),
                                   std::vector<Rational>{Rational(1, 2), Rational(1, 4)});
    CHECK(ok.is_lattice);
    CHECK(ok.declared);
    CHECK_THROWS_AS(verify_lattice(r, D, 0.5, {1, 3}), ValidationError);
    CHECK_THROWS_AS(verify_lattice({0.25, 0.0625}, D, 0.5, {2, 4}), ValidationError);
  }

  TEST_CASE("attractor_points counts words") {
    const Attractor A(gasket());
    const double diam0 = 2.0 * A.ball().radius;
    CHECK(A.points(diam0).size() == 1);
    CHECK(A.points(2.0 * diam0).size() == 1);
    CHECK(A.points(diam0 / 2).size() == 3);
    for (int k = 1; k <= 6; ++k) CHECK(A.points(diam0 / std::pow(2.0, k)).size() == static_cast<std::size_t>(std::pow(3, k)));
    CHECK_THROWS_AS(A.points(diam0 / 1024, 1000), CapacityError);
    CHECK_THROWS_AS(A.points(0.0), ValidationError);
  }

  TEST_CASE("attractor_points is a two-sided cover") {
    const Attractor A(gasket());
    const double delta = 0.01;
    const auto pts = A.points(delta);
    const auto fine = A.points(delta / 16);
    // Every point of F lies near a fine point, and so near a coarse one.
    for (std::size_t i = 0; i < fine.size(); i += 7) CHECK(brute_distance(pts, fine[i]) <= delta + delta / 16);
    for (const auto& p : pts) CHECK(A.distance(p, 1e-9) <= delta);
  }

  TEST_CASE("distance_to_attractor examples") {
    const Attractor A(gasket());
    for (int i = 0; i < 3; ++i) CHECK(A.distance(A.ifs().map(i).fixed_point(), 1e-9) <= 1e-9);
    const double d = A.distance(v2(0.5, std::sqrt(3.0) / 6), 1e-10);
    CHECK(std::abs(d - std::sqrt(3.0) / 12) <= 1e-10);
    const auto pts = A.points(1e-4);
    CHECK(std::abs(brute_distance(pts, v2(0.5, std::sqrt(3.0) / 6)) - d) <= 1e-4);
    const Vec far = A.ball().center + v2(A.ball().radius + 10.0, 0);
    const double df = A.distance(far, 1e-6);
    CHECK(df >= 10.0 - 1e-6);
    CHECK(df <= 10.0 + 2 * A.ball().radius);
    const DistanceBracket b = A.bracket(far, 1e-6);
    CHECK(b.upper - b.lower <= 1e-6);
  }

  TEST_CASE("distance agrees with brute force on gasket and carpet") {
    for (const char* name : {"gasket-hull", "carpet-hull"}) {
      const Scene s = corpus_scene(name);
      const Attractor A(s.ifs);
      const double tol = std::string(name) == "gasket-hull" ? 4e-3 : 1e-2;
      const auto pts = A.points(tol / 10);
      std::mt19937_64 rng(5);
      std::uniform_real_distribution<double> u(-0.2, 1.2);
      for (int i = 0; i < 100; ++i) {
        const Vec x = v2(u(rng), u(rng));
        CHECK(std::abs(A.distance(x, tol) - brute_distance(pts, x)) <= 2 * tol);
      }
    }
  }

  TEST_CASE("distance is 1-Lipschitz") {
    const Attractor A(corpus_scene("koch-hull").ifs);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.5, 1.5), s(-0.05, 0.05);
    const double tol = 1e-7;
    for (int i = 0; i < 300; ++i) {
      const Vec x = v2(u(rng), u(rng));
      const Vec y = x + v2(s(rng), s(rng));
      CHECK(std::abs(A.distance(x, tol) - A.distance(y, tol)) <= (x - y).norm() + 2 * tol);
    }
  }

  TEST_CASE("nearest_attractor_point examples") {
    const Attractor A(gasket());
    const double tol = 1e-6;
    const Vec f = A.ifs().map(2).fixed_point();
    CHECK((A.nearest_point(f, tol) - f).norm() <= 2 * tol);
    CHECK((A.nearest_point(v2(0.5, -1), tol) - v2(0.5, 0)).norm() <= 2 * tol);
    const Attractor sq(corpus_scene("square-r3").ifs);
    CHECK((sq.nearest_point(v3(0.5, 0.5, 0.3), tol) - v3(0.5, 0.5, 0)).norm() <= 2 * tol);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 50; ++i) {
      const Vec x = v2(u(rng), u(rng));
      const Vec y = A.nearest_point(x, tol);
      CHECK((x - y).norm() <= A.distance(x, tol) + 2 * tol);
      CHECK(A.distance(y, tol) <= 2 * tol);
    }
  }

  TEST_CASE("affine_hull_dimension") {
    CHECK(Attractor(gasket()).affine_hull_dimension(1e-9) == 2);
    CHECK(Attractor(corpus_scene("square-r3").ifs).affine_hull_dimension(1e-9) == 2);
    const IteratedFunctionSystem seg({Similarity::planar(0.5, 0, 0, 0), Similarity::planar(0.5, 0, 0.5, 0.5)});
    CHECK(Attractor(seg).affine_hull_dimension(1e-9) == 1);
  }
}
