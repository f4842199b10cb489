#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "minklab/errors.hpp"
#include "minklab/measurability.hpp"
#include "minklab/pipeline.hpp"
#include "minklab/scene.hpp"
#include "minklab/svg.hpp"

using namespace minklab;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string validation_message(const Json& doc) {
  try {
    parse_scene(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("every built-in scene round-trips") {
    for (const auto& name : corpus_names()) {
      const Scene s = corpus_scene(name);
      const std::string once = dump_json(emit_scene(s));
      const Scene again = parse_scene_text(once);
      CHECK(dump_json(emit_scene(again)) == once);
      CHECK(again.ifs.size() == s.ifs.size());
      CHECK(again.name == name);
      CHECK(emit_scene(s)["schema"] == kSceneSchema);
    }
  }

  TEST_CASE("scene validation messages are actionable") {
    Json one = corpus_document("gasket-hull");
    one["maps"] = Json::array({one["maps"][0]});
    CHECK(validation_message(one).find("at least two maps") != std::string::npos);
    Json big = corpus_document("gasket-hull");
    big["maps"][1]["ratio"] = "3/2";
    CHECK(validation_message(big).find("not contractive") != std::string::npos);
    Json bad = corpus_document("gasket-hull");
    bad["maps"][0]["ratio"] = "1//2";
    const std::string msg = validation_message(bad);
    CHECK(msg.find("1//2") != std::string::npos);
    CHECK(msg.find("maps[0]") != std::string::npos);
    Json dim = corpus_document("gasket-hull");
    dim["dim"] = 9;
    CHECK_FALSE(validation_message(dim).empty());
    CHECK_THROWS_AS(parse_scene_text("{not json"), ValidationError);
    CHECK_THROWS_AS(load_scene("/nonexistent/scene.json"), ValidationError);
    CHECK_THROWS_AS(corpus_scene("no-such-scene"), ValidationError);
  }

  TEST_CASE("floats are written with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2.0");
    CHECK(format_double(std::nan("")) == "null");
    CHECK(dump_json(Json{{"b", 1}, {"a", 0.5}}, 0).find("\"a\"") < dump_json(Json{{"b", 1}, {"a", 0.5}}, 0).find("\"b\""));
  }

  TEST_CASE("declared data is analyzed exactly") {
    const Scene sq = corpus_scene("square-r3");
    const SceneInfo info = analyze(sq);
    CHECK(info.integer_D == 2);
    CHECK(info.D == 2.0);
    CHECK(info.lattice.is_lattice);
    CHECK(info.lattice.exact_base == Rational(1, 2));
    REQUIRE(sq.pluriphase);
    CHECK(sq.pluriphase->is_exact());
    CHECK(sq.g_exact == Surd(Rational(1, 2)));
    const SceneInfo gk = analyze(corpus_scene("gasket-central"));
    CHECK(gk.D == std::log2(3.0));
    CHECK_FALSE(gk.integer_D);
    CHECK_FALSE(analyze(corpus_scene("gasket-nonlattice")).lattice.is_lattice);
  }
}

TEST_SUITE("measurability") {
  TEST_CASE("square slab: measurable with content 2 along both affine and integer paths") {
    const MeasurabilityVerdict v = decide_measurability(corpus_scene("square-r3"));
    CHECK(v.status == "measurable");
    CHECK(v.path == "b");
    REQUIRE(v.content_exact);
    CHECK(*v.content_exact == Surd(2));
    REQUIRE(v.factor_exact);
    CHECK(*v.factor_exact == Surd(1));
    REQUIRE(v.C_exact);
    CHECK(*v.C_exact == Surd(2));
    REQUIRE(v.conditions);
    CHECK(v.conditions->pass);
    CHECK(v.affine_dimension == 2);
    const Json j = v.to_json();
    CHECK(j["schema"] == kVerdictSchema);
    CHECK(j["content_exact"] == "2");
  }

  TEST_CASE("gasket central: not measurable through the non-integer lattice path") {
    const MeasurabilityVerdict v = decide_measurability(corpus_scene("gasket-central"));
    CHECK(v.status == "not-measurable");
    CHECK(v.path == "d");
    REQUIRE(v.oscillation);
    CHECK(v.oscillation->amplitude > 0.0);
    REQUIRE(v.average);
    CHECK(v.average->route_gap <= 1e-9);
    CHECK_FALSE(v.content);
  }

  TEST_CASE("nonlattice scenes are measurable") {
    const MeasurabilityVerdict c = decide_measurability(corpus_scene("cantor-nonlattice"));
    CHECK(c.status == "measurable");
    CHECK(c.path == "c");
    REQUIRE(c.content);
    // η^{-1} (∫_0^g 2ε·ε^{D-2} dε + λ(Γ) g^{D-1} / (1 - D)) for the two-map Cantor set.
    const double D = c.D;
    const double eta = -(std::pow(0.5, D) * std::log(0.5) + std::pow(1.0 / 3, D) * std::log(1.0 / 3));
    const double g = 1.0 / 12;
    const double integral = 2 * std::pow(g, D) / D + (1.0 / 6) * std::pow(g, D - 1) / (1 - D);
    CHECK(*c.content == doctest::Approx(integral / eta).epsilon(1e-12));
    DecideOptions fast;
    fast.method = VolumeMethod::qmc(100000);
    const MeasurabilityVerdict gn = decide_measurability(corpus_scene("gasket-nonlattice"), fast);
    CHECK(gn.status == "measurable");
    CHECK(gn.path == "c");
    REQUIRE(gn.content);
    CHECK(*gn.content > 0.0);
    REQUIRE(gn.content_error);
    CHECK(std::isfinite(*gn.content_error));
  }

  TEST_CASE("trivial attractor takes the full-dimension path") {
    DecideOptions fast;
    fast.method = VolumeMethod::qmc(20000);
    const MeasurabilityVerdict v = decide_measurability(corpus_scene("square-full"), fast);
    CHECK(v.status == "measurable");
    CHECK(v.path == "a");
    REQUIRE(v.content);
    REQUIRE(v.content_error);
    CHECK(std::abs(*v.content - 1.0) <= 3 * *v.content_error + 0.01);
  }

  TEST_CASE("lattice scene without data is undecided") {
    Scene s = corpus_scene("gasket-hull");
    s.pluriphase.reset();
    DecideOptions fast;
    fast.method = VolumeMethod::qmc(50000);
    const MeasurabilityVerdict v = decide_measurability(s, fast);
    CHECK(v.status == "undecided-numeric");
    CHECK(v.path == "f");
    REQUIRE(v.oscillation);
    CHECK(v.oscillation->error >= 0.0);
  }

  TEST_CASE("open set violations stop the decision") {
    CHECK_THROWS_AS(decide_measurability(corpus_scene("gasket-disk")), ConditionFailure);
  }

  TEST_CASE("supplied pluriphase data overrides the scene block") {
    DecideOptions opt;
    opt.pluriphase = *corpus_scene("gasket-central-geometric").pluriphase;
    const MeasurabilityVerdict v = decide_measurability(corpus_scene("gasket-central"), opt);
    CHECK(v.status == "not-measurable");
    REQUIRE(v.average);
    // (1/ln 2) (∫_0^g λ(F_ε ∩ Γ) ε^{D-3} dε + λ(Γ) g^{D-2} / (2 - D)) by the trapezoid rule in u = ln(g/ε).
    const PluriphaseData& p = *opt.pluriphase;
    const double D = p.similarity_dim, g = p.g();
    const int n = 400000;
    const double umax = 60.0, du = umax / n;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double e = g * std::exp(-i * du);
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      integral += w * p.eval(e) * std::pow(e, D - 2) * du;
    }
    const double expect = (integral + p.gamma_volume * std::pow(g, D - 2) / (2 - D)) / std::log(2.0);
    CHECK(v.average->value == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_SUITE("render") {
  TEST_CASE("gasket hull tiles to depth 3") {
    const RenderResult r = render_svg(corpus_scene("gasket-hull"), {3});
    CHECK(r.tiles == 40);
    CHECK(r.polygons == 40);
    CHECK(count(r.svg, "class=\"tile\"") == 40);
    CHECK(count(r.svg, "<polygon") == 41);
    CHECK(r.svg.rfind("<svg", 0) == 0);
  }

  TEST_CASE("depth 0 draws gamma alone and depth 1 three images of it") {
    const Scene s = corpus_scene("gasket-central");
    const RenderResult r0 = render_svg(s, {0});
    CHECK(r0.tiles == 1);
    const RenderResult r1 = render_svg(s, {1});
    CHECK(r1.tiles == 4);
    // Γ of the central open set has three components.
    CHECK(r1.polygons == 4 * s.gamma_polygons.size());
    CHECK(s.gamma_polygons.size() == 3);
  }

  TEST_CASE("rendering is deterministic") {
    for (const char* name : {"gasket-hull", "koch-hull"}) {
      const Scene s = corpus_scene(name);
      CHECK(render_svg(s, {2}).svg == render_svg(s, {2}).svg);
    }
    const RenderResult cloud = render_svg(corpus_scene("koch-hull"), {1});
    CHECK((cloud.points > 0 || cloud.polygons > 0));
    CHECK_THROWS_AS(render_svg(corpus_scene("square-r3")), ValidationError);
    CHECK_THROWS_AS(render_svg(corpus_scene("gasket-hull"), {9}), ValidationError);
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("curve CSV round trip") {
    VolumeCurve c;
    c.epsilons = {0.1, 0.2};
    c.values = {1.0 / 3, 2.0 / 3};
    c.std_errors = {1e-5, 2e-5};
    const std::string text = curve_csv(c);
    CHECK(text.rfind("epsilon,value,std_error\n", 0) == 0);
    const VolumeCurve back = read_curve_csv(text);
    CHECK(back.epsilons == c.epsilons);
    CHECK(back.values == c.values);
    CHECK(back.std_errors == c.std_errors);
    CHECK_THROWS_AS(read_curve_csv("epsilon,value\n0.1;2\n"), ValidationError);
    CHECK_THROWS_AS(read_curve_csv("epsilon,value\n"), ValidationError);
  }

  TEST_CASE("square slab pipeline") {
    const auto dir = std::filesystem::temp_directory_path() / "minklab-unit-square";
    std::filesystem::remove_all(dir);
    PipelineOptions opt;
    opt.method = VolumeMethod::qmc(50000);
    opt.curve_points = 40;
    const PipelineReport rep = examples_run("square-r3", dir.string(), opt);
    REQUIRE(rep.verdict);
    CHECK(rep.verdict->status == "measurable");
    REQUIRE(rep.verdict->content_exact);
    CHECK(*rep.verdict->content_exact == Surd(2));
    for (const char* f : {"scene.json", "checks.json", "volume_gamma.csv", "pluriphase.json", "verdict.json", "report.json"})
      CHECK(std::filesystem::exists(dir / f));
    CHECK_FALSE(std::filesystem::exists(dir / "tiles.svg"));
  }

  TEST_CASE("gasket pipelines") {
    const auto base = std::filesystem::temp_directory_path() / "minklab-unit-gasket";
    std::filesystem::remove_all(base);
    PipelineOptions opt;
    opt.method = VolumeMethod::qmc(100000);
    const PipelineReport c = examples_run("gasket-central", (base / "central").string(), opt);
    REQUIRE(c.verdict);
    CHECK(c.verdict->status == "not-measurable");
    CHECK(c.verdict->D == std::log2(3.0));
    const PipelineReport h = examples_run("gasket-hull", (base / "hull").string(), opt);
    REQUIRE(h.pluriphase);
    CHECK(is_monophase(*h.pluriphase));
    REQUIRE(h.verdict);
    CHECK(h.verdict->status == "not-measurable");
    CHECK(h.verdict->path == "d");
    // Same flags, same bytes.
    const PipelineReport h2 = examples_run("gasket-hull", (base / "hull2").string(), opt);
    for (const auto& f : h.artifacts) CHECK(read_file(base / "hull" / f) == read_file(base / "hull2" / f));
  }

  TEST_CASE("a failing stage is named") {
    const auto dir = std::filesystem::temp_directory_path() / "minklab-unit-skewed";
    try {
      examples_run("gasket-skewed", dir.string());
      FAIL("expected a condition failure");
    } catch (const ConditionFailure& e) {
      CHECK(std::string(e.what()).rfind("stage checks: ", 0) == 0);
    }
  }
}
