#include <cmath>
#include <random>

#include "../support/instances.hpp"
#include "doctest.h"
#include "minklab/errors.hpp"
#include "minklab/parvol.hpp"
#include "minklab/pluriphase.hpp"
#include "minklab/scene.hpp"

using namespace minklab;
using namespace minklab::testing;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("pluriphase") {
  TEST_CASE("eval uses half-open pieces") {
    const PluriphaseData p = gasket_table_data();
    const Surd e1 = s3(1, 24), g = s3(1, 6);
    CHECK(p.eval_exact(e1) == s3(1, 32));
    CHECK(p.eval_exact(g) == s3(1, 4));
    CHECK(p.piece_of(p.g()) == 2);
    CHECK(p.piece_of(p.a(1)) == 1);
    CHECK(p.piece_of(2 * p.g()) == 3);
    CHECK(p.eval(0.0) == 0.0);
    CHECK(p.eval(1.0) == doctest::Approx(std::sqrt(3.0) / 4));
    CHECK(p.eval(std::sqrt(3.0) / 24) == doctest::Approx(std::sqrt(3.0) / 32).epsilon(1e-14));
    const PluriphaseData sq = square_data();
    CHECK(sq.eval_exact(rat(3, 8)) == rat(1, 4));
    CHECK(eval(sq, 0.375) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sq.eval(0.2) == 0.0);
  }

  TEST_CASE("augmented row") {
    for (const PluriphaseData& p : {square_data(), gasket_table_data(), gasket_geometric_data()}) {
      const int M = p.pieces(), d = p.ambient_dim;
      for (int k = 0; k < d; ++k) {
        CHECK(p.kappa(M + 1, k) == 0.0);
        CHECK(p.kappa_exact(M + 1, k).is_zero());
      }
      CHECK(p.kappa(M + 1, d) == p.gamma_volume);
      CHECK(p.kappa_exact(M + 1, d) == p.exact->gamma_volume);
      CHECK(p.a(0) == 0.0);
    }
  }

  TEST_CASE("validate") {
    CHECK(validate(square_data()).empty());
    CHECK(validate(gasket_table_data()).empty());
    CHECK(validate(gasket_geometric_data()).empty());
    PluriphaseData bad = square_data();
    bad.exact.reset();
    bad.coeffs[0][3] = 0.1;
    CHECK(mentions(validate(bad), "κ_{1,k}=0 for k≥D"));
    PluriphaseData dup;
    dup.ambient_dim = 2;
    dup.similarity_dim = 1.5;
    dup.breakpoints = {0.5, 1.0};
    dup.coeffs = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    dup.gamma_volume = 1.0;
    CHECK(mentions(validate(dup), "minimal"));
    PluriphaseData dec = dup;
    dec.coeffs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
    CHECK(mentions(validate(dec), "nondecreasing"));
  }

  TEST_CASE("shipped data is nondecreasing on a dense grid") {
    for (const auto& name : corpus_names()) {
      const Scene s = corpus_scene(name);
      if (!s.pluriphase) continue;
      const PluriphaseData& p = *s.pluriphase;
      double prev = 0.0;
      for (int i = 1; i <= 10000; ++i) {
        const double v = p.eval(1.2 * p.g() * i / 10000.0);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("is_monophase") {
    CHECK_FALSE(is_monophase(square_data()));
    CHECK_FALSE(is_monophase(gasket_table_data()));
    PluriphaseData mono;
    mono.ambient_dim = 2;
    mono.similarity_dim = std::log2(3.0);
    mono.breakpoints = {0.1};
    mono.coeffs = {{-5.0, 1.5, 0.0}};
    mono.gamma_volume = 0.1;
    CHECK(is_monophase(mono));
  }

  TEST_CASE("fit recovers the gasket table from noiseless samples") {
    const PluriphaseData p = gasket_table_data();
    const double g = p.g();
    std::vector<double> e, v, s;
    for (int i = 0; i < 400; ++i) {
      e.push_back(g * 1.2 * std::pow(0.01 / 1.2, i / 399.0));
      v.push_back(p.eval(e.back()));
      s.push_back(0.0);
    }
    const FitResult f = fit(e, v, s, 2, p.similarity_dim, g);
    REQUIRE(f.ok);
    REQUIRE(f.data->pieces() == 2);
    const double r3 = std::sqrt(3.0);
    CHECK(std::abs(f.data->a(1) - r3 / 12) <= 1e-3);
    CHECK(std::abs(f.data->a(2) - r3 / 6) <= 1e-3);
    CHECK(std::abs(f.data->kappa(1, 0) - 6 * r3) <= 1e-3);
    CHECK(std::abs(f.data->kappa(2, 0) - 6 * r3) <= 1e-3);
    CHECK(std::abs(f.data->kappa(2, 1) + 3) <= 1e-3);
    CHECK(std::abs(f.data->kappa(2, 2) - r3 / 4) <= 1e-3);
    CHECK(f.data->provenance == "empirical");
  }

  TEST_CASE("fit of a single polynomial is monophase") {
    std::vector<double> e, v, s;
    for (int i = 1; i <= 200; ++i) {
      e.push_back(i / 200.0);
      v.push_back(2 * e.back() * e.back());
      s.push_back(0.0);
    }
    e.push_back(1.5);
    v.push_back(2.0);
    s.push_back(0.0);
    const FitResult f = fit(e, v, s, 2, 1.5, 1.0);
    REQUIRE(f.ok);
    CHECK(is_monophase(*f.data));
    CHECK(f.data->kappa(1, 0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(f.data->kappa(1, 1)) <= 1e-9);
    CHECK(f.data->gamma_volume == doctest::Approx(2.0));
  }

  TEST_CASE("fit refuses a non-pluriphase curve") {
    std::vector<double> e, v, s;
    for (int i = 0; i < 400; ++i) {
      e.push_back(std::pow(0.01, 1.0 - i / 399.0));
      const double x = e.back();
      v.push_back(x * x + 0.05 * x * std::sin(1.0 / x));
      s.push_back(0.0);
    }
    const FitResult f = fit(e, v, s, 2, 1.5, 1.0);
    CHECK_FALSE(f.ok);
    CHECK_FALSE(f.message.empty());
  }

  TEST_CASE("fit rejects under-determined input") {
    CHECK_THROWS_AS(fit({0.1, 0.2}, {0.01, 0.04}, {0.0, 0.0}, 2, 1.5, 0.2), ValidationError);
  }

  TEST_CASE("fit and eval round trip on random continuous data") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      const int d = 1 + static_cast<int>(rng() % 3);
      const int M = 1 + static_cast<int>(rng() % 4);
      double D = 0;
      do D = d * u(rng);
      while (D < 0.1 || std::abs(D - std::round(D)) < 0.05);
      const double g = 0.5 + u(rng);
      PluriphaseData p;
      p.ambient_dim = d;
      p.similarity_dim = D;
      // Breakpoints a factor of at least 1.6 apart.
      std::vector<double> a{g};
      for (int m = 1; m < M; ++m) a.insert(a.begin(), a.front() / (1.6 + u(rng)));
      p.breakpoints = a;
      p.coeffs.assign(static_cast<std::size_t>(M), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
      for (int k = 0; k < D; ++k) p.coeffs[0][static_cast<std::size_t>(k)] = 0.5 + 2 * u(rng);
      for (int m = 2; m <= M; ++m) {
        auto& row = p.coeffs[static_cast<std::size_t>(m - 1)];
        const auto& prev = p.coeffs[static_cast<std::size_t>(m - 2)];
        for (int k = 0; k < d; ++k) row[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k)] + (u(rng) - 0.3);
        // Continuity at a_{m-1} fixes the constant term.
        const double x = a[static_cast<std::size_t>(m - 2)];
        double left = 0.0, right = 0.0;
        for (int k = 0; k <= d; ++k) left += prev[static_cast<std::size_t>(k)] * std::pow(x, d - k);
        for (int k = 0; k < d; ++k) right += row[static_cast<std::size_t>(k)] * std::pow(x, d - k);
        row[static_cast<std::size_t>(d)] = left - right;
      }
      p.gamma_volume = p.eval(g) + 0.1;
      std::vector<double> e, v, s;
      for (int i = 0; i < 600; ++i) {
        e.push_back(g * 1.3 * std::pow(0.005, i / 599.0));
        v.push_back(p.eval(e.back()));
        s.push_back(0.0);
      }
      const FitResult f = fit(e, v, s, d, D, g);
      REQUIRE_MESSAGE(f.ok, f.message);
      REQUIRE(f.data->pieces() == M);
      for (int m = 1; m <= M; ++m) {
        CHECK(std::abs(f.data->a(m) - p.a(m)) <= 1e-6);
        for (int k = 0; k <= d; ++k) CHECK(std::abs(f.data->kappa(m, k) - p.kappa(m, k)) <= 1e-6);
      }
      CHECK(std::abs(f.data->gamma_volume - p.gamma_volume) <= 1e-9);
    }
  }

  TEST_CASE("fit of a gamma-restricted sampled curve") {
    const Scene s = corpus_scene("gasket-hull");
    const Attractor A(s.ifs);
    std::vector<double> eps = geometric_epsilons(*s.g, std::pow(0.02, 1.0 / 79), 80);
    eps.push_back(1.5 * *s.g);
    const VolumeCurve c = parallel_volume(A, Domain::of(gamma(s.ifs, s.open_set)), eps, VolumeMethod::grid(1.0 / 1024));
    const FitResult f = fit(c, 2, std::log2(3.0), *s.g);
    REQUIRE(f.data);
    CHECK(is_monophase(*f.data));
    // A (2ε/ρ - ε²/ρ²) for the side-1/2 hole with inradius ρ.
    const double rho = std::sqrt(3.0) / 12, area = std::sqrt(3.0) / 16;
    CHECK(f.data->kappa(1, 0) == doctest::Approx(-area / (rho * rho)).epsilon(0.02));
    CHECK(f.data->kappa(1, 1) == doctest::Approx(2 * area / rho).epsilon(0.02));
  }
}
