#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "minklab/errors.hpp"
#include "minklab/lattice.hpp"
#include "minklab/measurability.hpp"
#include "minklab/parallel.hpp"
#include "minklab/parvol.hpp"
#include "minklab/pipeline.hpp"
#include "minklab/pluriphase.hpp"
#include "minklab/renewal.hpp"
#include "minklab/scene.hpp"
#include "minklab/svg.hpp"

namespace py = pybind11;
using namespace minklab;

namespace {

// A built-in name, a JSON document or a path.
Scene resolve(const std::string& source) {
  const auto names = corpus_names();
  if (std::find(names.begin(), names.end(), source) != names.end()) return corpus_scene(source);
  if (!source.empty() && source.front() == '{') return parse_scene_text(source);
  return load_scene(source);
}

VolumeMethod method_of(const std::string& kind, double h, std::size_t n, std::uint64_t seed) {
  if (kind == "grid") return VolumeMethod::grid(h);
  if (kind != "qmc") throw ValidationError("method must be \"grid\" or \"qmc\"");
  VolumeMethod m = VolumeMethod::qmc(n);
  m.seed = seed;
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parallel volumes, pluriphase data and Minkowski measurability of self-similar sets";

  const auto base = py::register_exception<Error>(m, "MinklabError");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConditionFailure>(m, "ConditionFailure", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DegenerateRegionError>(m, "DegenerateRegionError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());

  m.def("corpus_names", &corpus_names);
  m.def("similarity_dimension", &similarity_dimension, py::arg("ratios"));
  m.def("set_thread_limit", &set_thread_limit, py::arg("n"));

  m.def("scene_json", [](const std::string& scene) { return dump_json(emit_scene(resolve(scene))); }, py::arg("scene"));

  m.def(
      "decide",
      [](const std::string& scene, std::size_t n, std::uint64_t seed) {
        DecideOptions o;
        o.method = method_of("qmc", 0.0, n, seed);
        o.osc.seed = seed;
        return dump_json(decide_measurability(resolve(scene), o).to_json());
      },
      py::arg("scene"), py::arg("n") = 200'000, py::arg("seed") = kDefaultSeed);

  m.def(
      "parallel_volume",
      [](const std::string& scene, const std::vector<double>& eps, const std::string& restrict, const std::string& method,
         double h, std::size_t n, std::uint64_t seed) {
        const Scene s = resolve(scene);
        const Attractor A(s.ifs);
        const Domain dom = restrict == "all"    ? Domain::whole_space(s.dim())
                           : restrict == "open" ? Domain::of(s.open_set)
                           : restrict == "gamma"
                               ? Domain::of(gamma(s.ifs, s.open_set))
                               : throw ValidationError("restrict must be \"gamma\", \"open\" or \"all\"");
        const VolumeCurve c = parallel_volume(A, dom, eps, method_of(method, h, n, seed));
        std::vector<double> err(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) err[i] = c.std_errors[i] > 0.0 ? c.std_errors[i] : c.error_bounds[i];
        return py::make_tuple(c.epsilons, c.values, err);
      },
      py::arg("scene"), py::arg("eps"), py::arg("restrict") = "gamma", py::arg("method") = "qmc",
      py::arg("h") = 1.0 / 512, py::arg("n") = 200'000, py::arg("seed") = kDefaultSeed);

  m.def(
      "p",
      [](const std::string& scene, const std::vector<double>& eps, const std::string& form, int l_max) {
        const Scene s = resolve(scene);
        const SceneInfo info = analyze(s);
        if (!s.pluriphase) throw ValidationError("the scene has no pluriphase data");
        const OscillationProfile prof = p_closed_form(*s.pluriphase, info.lattice, info.integer_D);
        std::vector<double> out;
        for (double e : eps)
          out.push_back(form == "series" ? p_series(*s.pluriphase, info.lattice, e, l_max).value : prof.eval(e));
        return out;
      },
      py::arg("scene"), py::arg("eps"), py::arg("form") = "closed", py::arg("l_max") = 200);

  m.def(
      "fit",
      [](const std::vector<double>& eps, const std::vector<double>& values, const std::vector<double>& sigma, int d,
         double D, double g) {
        const FitResult r = fit(eps, values, sigma, d, D, g);
        if (!r.ok || !r.data) throw ConditionFailure("fit failed: " + r.message);
        return dump_json(emit_pluriphase(*r.data));
      },
      py::arg("eps"), py::arg("values"), py::arg("sigma"), py::arg("d"), py::arg("D"), py::arg("g"));

  m.def(
      "render_svg",
      [](const std::string& scene, int depth) {
        RenderOptions o;
        o.depth = depth;
        return render_svg(resolve(scene), o).svg;
      },
      py::arg("scene"), py::arg("depth") = 3);
}
