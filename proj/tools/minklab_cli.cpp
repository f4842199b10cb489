#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "minklab/attractor.hpp"
#include "minklab/errors.hpp"
#include "minklab/measurability.hpp"
#include "minklab/parallel.hpp"
#include "minklab/pipeline.hpp"
#include "minklab/renewal.hpp"
#include "minklab/svg.hpp"

using namespace minklab;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

/// A scene file, or the name of a built-in scene.
Scene resolve_scene(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_scene(ref);
  for (const auto& n : corpus_names())
    if (n == ref) return corpus_scene(n);
  throw ValidationError("no scene file or built-in scene named \"" + ref + "\"");
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    return parse_exact(s).to_double();
  } catch (const ValidationError& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_real(item, what));
  if (out.empty()) throw ValidationError(what + ": expected a comma-separated list");
  return out;
}

VolumeMethod parse_method(const std::string& source, std::uint64_t seed) {
  const auto colon = source.find(':');
  const std::string kind = source.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : source.substr(colon + 1);
  if (kind == "grid") {
    VolumeMethod m = VolumeMethod::grid(arg.empty() ? 1.0 / 512.0 : parse_real(arg, "--method grid:h"));
    m.seed = seed;
    return m;
  }
  if (kind == "qmc") {
    const double n = arg.empty() ? 200000.0 : parse_real(arg, "--method qmc:n");
    if (!(n >= 1.0)) throw ValidationError("--method qmc:n needs n >= 1");
    return VolumeMethod::qmc(static_cast<std::size_t>(n), seed);
  }
  throw ValidationError("--method must be grid:h or qmc:n, got \"" + source + "\"");
}

PluriphaseData load_pluriphase(const std::string& path, const Scene& scene) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": malformed JSON: " + e.what());
  }
  if (j.contains("pluriphase")) j = j["pluriphase"];
  return parse_pluriphase(j, scene.dim(), analyze(scene).D);
}

int exit_code_of(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DegenerateRegionError*>(&e)) return 2;
  if (dynamic_cast<const ConditionFailure*>(&e)) return 3;
  if (dynamic_cast<const CapacityError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minklab: parallel volumes, pluriphase data and Minkowski measurability of self-similar sets"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = default_seed();
  app.add_option("--threads", threads, "Cap on worker threads (0 = hardware default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Sampling seed (default: MINKLAB_SEED or the built-in seed)");

  // check
  auto* check = app.add_subcommand("check", "Open set, strong open set and projection conditions; g");
  std::string check_scene, check_out;
  std::size_t check_samples = 4000, check_proj = 1000;
  std::optional<double> check_gtol;
  check->add_option("--scene", check_scene, "Scene file or built-in name")->required();
  check->add_option("--samples", check_samples, "OSC samples per map");
  check->add_option("--projection-samples", check_proj, "Projection-condition samples per map");
  check->add_option("--g-tol", check_gtol, "Tolerance for g relative to the diameter of O");
  check->add_option("--out", check_out, "Output JSON (default stdout)");

  // parvol
  auto* pv = app.add_subcommand("parvol", "Parallel volume curve λ_d(F_ε ∩ domain)");
  std::string pv_scene, pv_restrict = "gamma", pv_geom, pv_eps, pv_method = "qmc:200000", pv_out;
  pv->add_option("--scene", pv_scene, "Scene file or built-in name")->required();
  pv->add_option("--restrict", pv_restrict, "gamma, open or all")->check(CLI::IsMember({"gamma", "open", "all"}));
  pv->add_option("--eps-geom", pv_geom, "g,rho,n: the values g*rho^j for j < n");
  pv->add_option("--eps", pv_eps, "Comma-separated ε values");
  pv->add_option("--method", pv_method, "grid:h or qmc:n");
  pv->add_option("--out", pv_out, "Output CSV (default stdout)");

  // fit
  auto* ft = app.add_subcommand("fit", "Piecewise-polynomial pluriphase fit of a Γ-restricted curve");
  std::string ft_in, ft_out, ft_scene, ft_D, ft_g;
  std::optional<int> ft_d;
  FitOptions fopt;
  ft->add_option("--in", ft_in, "Curve CSV (epsilon,value,std_error)")->required();
  ft->add_option("--scene", ft_scene, "Scene supplying d, D and g when flags are absent");
  ft->add_option("--d", ft_d, "Ambient dimension");
  ft->add_option("--D", ft_D, "Similarity dimension (number or expression)");
  ft->add_option("--g", ft_g, "Inradius g (number or expression)");
  ft->add_option("--max-pieces", fopt.max_pieces, "Largest number of pieces");
  ft->add_option("--threshold", fopt.threshold, "RMS threshold in units of σ");
  ft->add_option("--out", ft_out, "Output JSON (default stdout)");

  // p
  auto* pp = app.add_subcommand("p", "Periodic function p(ε) of a lattice scene");
  std::string pp_scene, pp_pl, pp_eps, pp_form = "closed", pp_out;
  int pp_lmax = 200;
  pp->add_option("--scene", pp_scene, "Scene file or built-in name")->required();
  pp->add_option("--pluriphase", pp_pl, "Pluriphase JSON replacing the scene block");
  pp->add_option("--eps", pp_eps, "Comma-separated ε values")->required();
  pp->add_option("--form", pp_form, "closed or series")->check(CLI::IsMember({"closed", "series"}));
  pp->add_option("--lmax", pp_lmax, "Truncation of the series form");
  pp->add_option("--out", pp_out, "Output CSV (default stdout)");

  // decide
  auto* dc = app.add_subcommand("decide", "Minkowski measurability verdict");
  std::string dc_scene, dc_pl, dc_out, dc_method = "qmc:200000";
  dc->add_option("--scene", dc_scene, "Scene file or built-in name")->required();
  dc->add_option("--pluriphase", dc_pl, "Pluriphase JSON replacing the scene block");
  dc->add_option("--method", dc_method, "Sampler for numeric paths: grid:h or qmc:n");
  dc->add_option("--out", dc_out, "Output JSON (default stdout)");

  // render
  auto* rd = app.add_subcommand("render", "SVG of the tiles S_w Γ");
  std::string rd_scene, rd_svg;
  int rd_depth = 3;
  rd->add_option("--scene", rd_scene, "Scene file or built-in name")->required();
  rd->add_option("--depth", rd_depth, "Largest word length");
  rd->add_option("--svg", rd_svg, "Output SVG path (default stdout)");

  // examples
  auto* ex = app.add_subcommand("examples", "Built-in scenes and the full pipeline");
  ex->require_subcommand(1);
  auto* ex_list = ex->add_subcommand("list", "Names of the built-in scenes");
  auto* ex_run = ex->add_subcommand("run", "Run the pipeline on a built-in scene");
  std::string ex_name, ex_out = "out";
  ex_run->add_option("name", ex_name, "Scene name")->required();
  ex_run->add_option("--out", ex_out, "Artifact directory (a subdirectory per scene)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    set_thread_limit(threads);
    if (*check) {
      const Scene s = resolve_scene(check_scene);
      CheckOptions o;
      o.osc.n_samples = check_samples;
      o.osc.seed = seed;
      o.projection_samples = check_proj;
      o.g_tol = check_gtol;
      const CheckReport r = run_checks(s, o);
      write_text(check_out, dump_json(r.to_json()) + "\n");
      return r.pass() ? 0 : 3;
    }
    if (*pv) {
      const Scene s = resolve_scene(pv_scene);
      std::vector<double> eps;
      if (!pv_geom.empty()) {
        const auto v = parse_list(pv_geom, "--eps-geom");
        if (v.size() != 3) throw ValidationError("--eps-geom expects g,rho,n");
        eps = geometric_epsilons(v[0], v[1], static_cast<int>(v[2]));
      }
      if (!pv_eps.empty())
        for (double e : parse_list(pv_eps, "--eps")) eps.push_back(e);
      if (eps.empty()) throw ValidationError("give --eps-geom or --eps");
      const Attractor A(s.ifs);
      const Domain dom = pv_restrict == "all"    ? Domain::whole_space(s.dim())
                         : pv_restrict == "open" ? Domain::of(s.open_set)
                                                 : Domain::of(gamma(s.ifs, s.open_set));
      const VolumeCurve c = parallel_volume(A, dom, eps, parse_method(pv_method, seed));
      write_text(pv_out, curve_csv(c));
      return 0;
    }
    if (*ft) {
      const VolumeCurve c = read_curve_csv(read_text(ft_in));
      std::optional<Scene> s;
      if (!ft_scene.empty()) s = resolve_scene(ft_scene);
      const int d = ft_d ? *ft_d : s ? s->dim() : throw ValidationError("fit needs --d or --scene");
      const double D = !ft_D.empty() ? parse_real(ft_D, "--D") : s ? analyze(*s).D : throw ValidationError("fit needs --D or --scene");
      double g = 0.0;
      if (!ft_g.empty()) g = parse_real(ft_g, "--g");
      else if (s && s->g) g = *s->g;
      else throw ValidationError("fit needs --g or a scene declaring g");
      const FitResult r = fit(c, d, D, g, fopt);
      if (!r.ok || !r.data) {
        std::cerr << "fit failed: " << r.message << "\n";
        return 3;
      }
      Json out = emit_pluriphase(*r.data);
      out["rms"] = r.rms;
      out["message"] = r.message;
      write_text(ft_out, dump_json(out) + "\n");
      return 0;
    }
    if (*pp) {
      const Scene s = resolve_scene(pp_scene);
      const SceneInfo info = analyze(s);
      std::optional<PluriphaseData> p = pp_pl.empty() ? s.pluriphase : std::optional(load_pluriphase(pp_pl, s));
      if (!p) throw ValidationError("the scene has no pluriphase data; pass --pluriphase");
      if (!info.lattice.is_lattice) throw ValidationError("p(ε) needs a lattice scene");
      const OscillationProfile prof = p_closed_form(*p, info.lattice, info.integer_D);
      std::ostringstream os;
      os << "epsilon,p\n";
      for (double e : parse_list(pp_eps, "--eps")) {
        const double v = pp_form == "closed" ? prof.eval(e) : p_series(*p, info.lattice, e, pp_lmax).value;
        os << format_double(e) << "," << format_double(v) << "\n";
      }
      write_text(pp_out, os.str());
      return 0;
    }
    if (*dc) {
      const Scene s = resolve_scene(dc_scene);
      DecideOptions o;
      o.osc.seed = seed;
      o.method = parse_method(dc_method, seed);
      if (!dc_pl.empty()) o.pluriphase = load_pluriphase(dc_pl, s);
      const MeasurabilityVerdict v = decide_measurability(s, o);
      write_text(dc_out, dump_json(v.to_json()) + "\n");
      return 0;
    }
    if (*rd) {
      const Scene s = resolve_scene(rd_scene);
      RenderOptions o;
      o.depth = rd_depth;
      o.seed = seed;
      write_text(rd_svg, render_svg(s, o).svg);
      return 0;
    }
    if (*ex_list) {
      for (const auto& n : examples_list()) std::cout << n << "\n";
      return 0;
    }
    if (*ex_run) {
      PipelineOptions o;
      o.checks.osc.seed = seed;
      o.method.seed = seed;
      const PipelineReport r = examples_run(ex_name, (std::filesystem::path(ex_out) / ex_name).string(), o);
      std::cout << dump_json(r.to_json()) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_of(e);
  }
  return 0;
}
