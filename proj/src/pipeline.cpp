#include "minklab/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "minklab/attractor.hpp"
#include "minklab/errors.hpp"
#include "minklab/svg.hpp"

namespace minklab {

namespace {

double diameter(const Region& r) {
  const BoundingBox& b = r.bounds();
  return (b.hi - b.lo).norm();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  const std::string p = "stage " + name + ": ";
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(p + e.what());
  } catch (const CapacityError& e) {
    throw CapacityError(p + e.what());
  } catch (const DegenerateRegionError& e) {
    throw DegenerateRegionError(p + e.what());
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(p + e.what());
  } catch (const ConditionFailure& e) {
    throw ConditionFailure(p + e.what());
  } catch (const std::exception& e) {
    throw Error(p + e.what());
  }
}

}  // namespace

bool CheckReport::pass() const {
  return osc.verdict != Verdict::Fail && projection.verdict != Verdict::Fail && g_consistent;
}

Json CheckReport::to_json() const {
  Json j;
  j["schema"] = kChecksSchema;
  j["osc"] = minklab::to_json(osc);
  j["sosc"] = minklab::to_json(sosc);
  j["projection"] = minklab::to_json(projection);
  Json gj = {{"estimate", g.value}, {"lower", g.lower}, {"upper", g.upper}, {"cells", g.cells}, {"tolerance", g_tol}};
  Json w = Json::array();
  for (int k = 0; k < g.witness.size(); ++k) w.push_back(g.witness(k));
  gj["witness"] = w;
  gj["declared"] = declared_g ? Json(*declared_g) : Json(nullptr);
  gj["consistent"] = g_consistent;
  j["g"] = gj;
  j["pass"] = pass();
  return j;
}

CheckReport run_checks(const Scene& scene, const CheckOptions& opt) {
  CheckReport rep;
  const Attractor A(scene.ifs);
  const double diam = diameter(scene.open_set);
  rep.osc = check_osc(scene.ifs, scene.open_set, opt.osc);
  rep.sosc = check_sosc(A, scene.open_set, opt.sosc_tol * diam);
  SamplingOptions proj = opt.osc;
  proj.n_samples = opt.projection_samples;
  proj.tol = opt.projection_tol * diam;
  rep.projection = check_projection_condition(A, scene.open_set, proj);
  rep.g_tol = opt.g_tol.value_or(scene.dim() <= 2 ? 1e-6 : 1e-3) * diam;
  rep.g = estimate_g(A, gamma(scene.ifs, scene.open_set), rep.g_tol);
  rep.declared_g = scene.g;
  if (scene.g) rep.g_consistent = std::abs(rep.g.value - *scene.g) <= rep.g_tol;
  return rep;
}

std::string curve_csv(const VolumeCurve& curve) {
  std::ostringstream os;
  os << "epsilon,value,std_error\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
    const double eb = i < curve.error_bounds.size() ? 0.5 * curve.error_bounds[i] : 0.0;
    os << format_double(curve.epsilons[i]) << "," << format_double(curve.values[i]) << "," << format_double(std::max(se, eb))
       << "\n";
  }
  return os.str();
}

VolumeCurve read_curve_csv(const std::string& text) {
  VolumeCurve c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("epsilon", 0) == 0) continue;
    double e = 0, v = 0, s = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    ls >> e >> c1 >> v;
    if (!ls || c1 != ',') throw ValidationError("curve CSV line " + std::to_string(lineno) + ": expected epsilon,value[,std_error]");
    if (ls >> c2 >> s) {
      if (c2 != ',') throw ValidationError("curve CSV line " + std::to_string(lineno) + ": malformed std_error");
    } else {
      s = 0.0;
    }
    c.epsilons.push_back(e);
    c.values.push_back(v);
    c.std_errors.push_back(s);
  }
  if (c.size() == 0) throw ValidationError("curve CSV holds no data rows");
  c.method = "csv";
  return c;
}

Json PipelineReport::to_json() const {
  Json j;
  j["schema"] = kReportSchema;
  j["name"] = name;
  Json st = Json::array();
  for (const auto& s : stages) st.push_back({{"name", s.name}, {"status", s.status}, {"detail", s.detail}});
  j["stages"] = st;
  j["artifacts"] = artifacts;
  if (verdict) {
    j["status"] = verdict->status;
    j["path"] = verdict->path;
    j["D"] = verdict->D;
    j["content"] = verdict->content ? Json(*verdict->content) : Json(nullptr);
    j["content_exact"] = verdict->content_exact ? Json(verdict->content_exact->to_string()) : Json(nullptr);
  }
  j["pieces"] = pluriphase ? Json(pluriphase->pieces()) : Json(nullptr);
  j["monophase"] = pluriphase ? Json(is_monophase(*pluriphase)) : Json(nullptr);
  return j;
}

PipelineReport run_pipeline(const Scene& input, const std::string& outdir, const PipelineOptions& opt) {
  namespace fs = std::filesystem;
  const fs::path dir(outdir);
  fs::create_directories(dir);
  PipelineReport rep;
  rep.name = input.name;
  Scene scene = input;
  auto emit = [&](const std::string& file, const std::string& text) {
    write_file(dir / file, text);
    rep.artifacts.push_back(file);
  };
  emit("scene.json", dump_json(emit_scene(scene)) + "\n");
  const SceneInfo info = stage("checks", [&] { return analyze(scene); });

  stage("checks", [&] {
    CheckReport c = run_checks(scene, opt.checks);
    emit("checks.json", dump_json(c.to_json()) + "\n");
    if (c.osc.verdict == Verdict::Fail) throw ConditionFailure("open set condition violated: " + c.osc.detail);
    if (c.projection.verdict == Verdict::Fail) throw ConditionFailure("projection condition violated: " + c.projection.detail);
    if (!c.g_consistent)
      throw ConsistencyError("declared g = " + format_double(*scene.g) + " but the certified estimate is " +
                             format_double(c.g.value));
    if (!scene.g) scene.g = c.g.value;
    rep.stages.push_back({"checks", "ok",
                          "osc " + to_string(c.osc.verdict) + ", projection " + to_string(c.projection.verdict) +
                              ", g = " + format_double(*scene.g)});
  });

  const double g = *scene.g;
  const int d = scene.dim();
  VolumeCurve curve = stage("volumes", [&] {
    const int n = std::max(opt.curve_points, 16);
    std::vector<double> eps = geometric_epsilons(g, std::pow(opt.curve_min_fraction, 1.0 / (n - 1)), n);
    for (double u : {1.1, 1.25, 1.5, 2.0}) eps.push_back(u * g);
    VolumeCurve c = parallel_volume(Attractor(scene.ifs), Domain::of(gamma(scene.ifs, scene.open_set)), eps, opt.method);
    emit("volume_gamma.csv", curve_csv(c));
    std::string detail = std::to_string(c.size()) + " values of λ_d(F_ε ∩ Γ) by " + c.method;
    if (scene.pluriphase) {
      double worst = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs(c.values[i] - scene.pluriphase->eval(c.epsilons[i])));
      detail += "; largest deviation from the declared data " + format_double(worst / scene.pluriphase->gamma_volume) +
                " of λ_d(Γ)";
    }
    rep.stages.push_back({"volumes", "ok", detail});
    return c;
  });

  stage("pluriphase", [&] {
    if (scene.pluriphase) {
      rep.pluriphase = scene.pluriphase;
      emit("pluriphase.json", dump_json(emit_pluriphase(*scene.pluriphase)) + "\n");
      rep.stages.push_back({"pluriphase", "ok", "declared data with " + std::to_string(scene.pluriphase->pieces()) + " pieces"});
      return;
    }
    if (!info.lattice.is_lattice || !(info.D < d - 1e-9)) {
      rep.stages.push_back({"pluriphase", "skipped", "not needed for a nonlattice or positive-measure attractor"});
      return;
    }
    FitResult f = fit(curve, d, info.D, g, opt.fit);
    if (!f.ok || !f.data) {
      rep.stages.push_back({"pluriphase", "no-fit", f.message});
      return;
    }
    rep.pluriphase = f.data;
    emit("pluriphase.json", dump_json(emit_pluriphase(*f.data)) + "\n");
    rep.stages.push_back({"pluriphase", "ok",
                          "fitted " + std::to_string(f.data->pieces()) + " pieces, rms " + format_double(f.rms) + ": " + f.message});
  });

  stage("decide", [&] {
    DecideOptions dopt;
    dopt.osc = opt.checks.osc;
    dopt.method = opt.method;
    dopt.pluriphase = rep.pluriphase;
    MeasurabilityVerdict v = decide_measurability(scene, dopt);
    emit("verdict.json", dump_json(v.to_json()) + "\n");
    rep.stages.push_back({"decide", "ok", v.status + " via path (" + v.path + ")"});
    rep.verdict = std::move(v);
  });

  stage("render", [&] {
    if (d != 2) {
      rep.stages.push_back({"render", "skipped", "rendering needs d = 2"});
      return;
    }
    RenderOptions r;
    r.depth = opt.render_depth;
    r.seed = opt.checks.osc.seed;
    RenderResult out = render_svg(scene, r);
    emit("tiles.svg", out.svg);
    rep.stages.push_back({"render", "ok", std::to_string(out.tiles) + " tiles"});
  });

  rep.artifacts.push_back("report.json");
  write_file(dir / "report.json", dump_json(rep.to_json()) + "\n");
  return rep;
}

std::vector<std::string> examples_list() { return corpus_names(); }

PipelineReport examples_run(const std::string& name, const std::string& outdir, const PipelineOptions& options) {
  return run_pipeline(corpus_scene(name), outdir, options);
}

}  // namespace minklab
