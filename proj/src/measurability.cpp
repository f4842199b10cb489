#include "minklab/measurability.hpp"

#include <cmath>

#include "minklab/attractor.hpp"
#include "minklab/errors.hpp"

namespace minklab {

namespace {

Json opt_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt_exact(const std::optional<Surd>& v) { return v ? Json(v->to_string()) : Json(nullptr); }

Json to_json(const ConditionFormulation& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms)
    terms.push_back({{"k", t.k}, {"q", t.q}, {"value", t.value}, {"exact", opt_exact(t.exact_value)}, {"holds", t.holds}});
  return {{"pass", f.pass},
          {"C", opt_number(f.C)},
          {"C_exact", opt_exact(f.C_exact)},
          {"first_failure", f.first_failure},
          {"terms", terms}};
}

double diameter(const Region& r) {
  const BoundingBox& b = r.bounds();
  return (b.hi - b.lo).norm();
}

/// λ_d(F_ε ∩ Γ) on a geometric grid below g, plus one point beyond g for λ_d(Γ).
VolumeCurve gamma_curve(const Attractor& A, const Scene& scene, double g, const DecideOptions& opt, double& gamma_volume) {
  const int n = std::max(opt.curve_points, 8);
  std::vector<double> eps = geometric_epsilons(g, std::pow(1e-3, 1.0 / (n - 1)), n);
  eps.push_back(1.25 * g);
  VolumeCurve c = parallel_volume(A, Domain::of(gamma(scene.ifs, scene.open_set)), eps, opt.method);
  gamma_volume = c.values.back();
  for (auto* v : {&c.epsilons, &c.values, &c.std_errors, &c.error_bounds})
    if (!v->empty()) v->pop_back();
  return c;
}

VolumeCurve shifted(const VolumeCurve& c, double sign) {
  VolumeCurve s = c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double se = i < s.std_errors.size() ? s.std_errors[i] : 0.0;
    const double eb = i < s.error_bounds.size() ? s.error_bounds[i] : 0.0;
    s.values[i] = std::max(s.values[i] + sign * (se + 0.5 * eb), 1e-300);
  }
  return s;
}

double resolve_g(const Attractor& A, const Scene& scene, const DecideOptions& opt, std::vector<std::string>& notes) {
  if (scene.g) return *scene.g;
  const GammaRegion gr = gamma(scene.ifs, scene.open_set);
  const GEstimate est = estimate_g(A, gr, opt.g_tol * diameter(scene.open_set));
  notes.push_back("g estimated as " + format_double(est.value) + " in [" + format_double(est.lower) + ", " +
                  format_double(est.upper) + "]");
  return est.value;
}

}  // namespace

std::optional<Surd> exact_content_factor(const LatticeInfo& lat, int D) {
  if (!lat.is_lattice || !lat.exact_base) return std::nullopt;
  Rational sum = 0;
  for (int k : lat.exponents) sum += Rational(k) * pow(*lat.exact_base, static_cast<long>(k) * D);
  return Surd(Rational(1) / sum);
}

Json to_json(const OscillationSummary& s) {
  return {{"inf", s.inf},         {"sup", s.sup},       {"amplitude", s.amplitude},
          {"error", s.error},     {"argmin", s.argmin}, {"argmax", s.argmax}};
}

Json to_json(const IntegerConditionReport& r) {
  return {{"exact", r.exact},
          {"D", r.D},
          {"pass", r.pass},
          {"C", opt_number(r.C)},
          {"C_exact", opt_exact(r.C_exact)},
          {"with_levels", to_json(r.with_levels)},
          {"with_groups", to_json(r.with_groups)}};
}

Json to_json(const ConditionReport& r) {
  Json j = {{"condition", r.condition},
            {"verdict", to_string(r.verdict)},
            {"detail", r.detail},
            {"samples", r.samples_used},
            {"tolerance", r.tolerance}};
  if (r.counterexample) {
    Json x = Json::array();
    for (int k = 0; k < r.counterexample->size(); ++k) x.push_back((*r.counterexample)(k));
    j["counterexample"] = x;
  }
  if (r.map_index) j["map_index"] = *r.map_index;
  if (r.sample_index) j["sample_index"] = *r.sample_index;
  return j;
}

Json to_json(const LatticeInfo& lat) {
  Json j = {{"is_lattice", lat.is_lattice}, {"declared", lat.declared}, {"eta", lat.eta}};
  if (lat.is_lattice) {
    j["base"] = lat.base;
    j["exponents"] = lat.exponents;
    j["h"] = lat.h;
    j["exact_base"] = lat.exact_base ? Json(to_string(*lat.exact_base)) : Json(nullptr);
  }
  return j;
}

Json MeasurabilityVerdict::to_json() const {
  Json j;
  j["schema"] = kVerdictSchema;
  j["status"] = status;
  j["path"] = path;
  j["reason"] = reason;
  j["d"] = d;
  j["D"] = D;
  j["integer_D"] = integer_D ? Json(*integer_D) : Json(nullptr);
  j["affine_dimension"] = affine_dimension;
  j["lattice"] = minklab::to_json(lattice);
  j["g"] = opt_number(g);
  j["content"] = opt_number(content);
  j["content_exact"] = opt_exact(content_exact);
  j["content_error"] = opt_number(content_error);
  j["factor"] = opt_number(factor);
  j["factor_exact"] = opt_exact(factor_exact);
  j["C"] = opt_number(C);
  j["C_exact"] = opt_exact(C_exact);
  if (average)
    j["average_content"] = {{"value", average->value},
                            {"profile_route", opt_number(average->profile_route)},
                            {"route_gap", average->route_gap}};
  else
    j["average_content"] = nullptr;
  j["oscillation"] = oscillation ? minklab::to_json(*oscillation) : Json(nullptr);
  j["conditions"] = conditions ? minklab::to_json(*conditions) : Json(nullptr);
  j["osc"] = minklab::to_json(osc);
  j["notes"] = notes;
  return j;
}

MeasurabilityVerdict decide_measurability(const Scene& scene, const DecideOptions& opt) {
  MeasurabilityVerdict v;
  const SceneInfo info = analyze(scene);
  v.d = scene.dim();
  v.D = info.D;
  v.integer_D = info.integer_D;
  v.lattice = info.lattice;
  v.osc = check_osc(scene.ifs, scene.open_set, opt.osc);
  if (v.osc.verdict == Verdict::Fail)
    throw ConditionFailure("open set condition violated: " + v.osc.detail +
                           (v.osc.map_index ? " (map " + std::to_string(*v.osc.map_index) + ")" : ""));
  if (v.D > v.d + 1e-9) throw ConditionFailure("similarity dimension exceeds the ambient dimension");

  const Attractor A(scene.ifs);
  v.affine_dimension = A.affine_hull_dimension(1e-9);
  const auto ratios = scene.ifs.ratios();
  std::optional<PluriphaseData> p = opt.pluriphase ? opt.pluriphase : scene.pluriphase;
  if (p) {
    p->similarity_dim = v.D;
    if (p->ambient_dim != v.d) throw ValidationError("pluriphase data has dimension " + std::to_string(p->ambient_dim) +
                                                     " but the scene has d = " + std::to_string(v.d));
    for (const auto& msg : validate(*p)) v.notes.push_back("pluriphase data: " + msg);
  }
  std::optional<int> Dint = info.integer_D;
  if (!Dint && std::abs(v.D - std::round(v.D)) < 1e-9) Dint = static_cast<int>(std::lround(v.D));

  // (a) positive-measure attractor
  if (Dint && *Dint == v.d) {
    v.path = "a";
    v.reason = "D = d: the attractor has positive measure and its content is its volume";
    v.status = "measurable";
    const double e1 = diameter(scene.open_set) / 256.0;
    VolumeCurve c = parallel_volume(A, Domain::whole_space(v.d), {e1, 2.0 * e1}, opt.method, 0.1 * e1);
    v.content = 2.0 * c.values[0] - c.values[1];
    v.content_error = std::abs(c.values[0] - *v.content) + 2.0 * c.std_errors[0] + c.std_errors[1];
    v.notes.push_back("volume from linear extrapolation of λ_d(F_ε) at ε = " + format_double(e1) + " and " +
                      format_double(2.0 * e1));
    return v;
  }

  auto run_integer = [&](int D) {
    v.conditions = integer_conditions(*p, v.lattice, D);
    const OscillationProfile prof = p_closed_form(*p, v.lattice, D);
    v.oscillation = oscillation(prof);
    v.average = average_content(*p, ratios, v.lattice, D);
    v.factor = content_factor(v.lattice, ratios, D);
    v.factor_exact = exact_content_factor(v.lattice, D);
    if (v.conditions->pass) {
      v.C = v.conditions->C;
      v.C_exact = v.conditions->C_exact;
      v.content = *v.factor * *v.C;
      if (v.C_exact && v.factor_exact) v.content_exact = *v.factor_exact * *v.C_exact;
    }
    return v.conditions->pass;
  };

  // (b) D equals the dimension of the affine hull
  if (Dint && *Dint == v.affine_dimension) {
    v.path = "b";
    v.reason = "D equals the dimension of the affine hull of F";
    v.status = "measurable";
    if (p && v.lattice.is_lattice) {
      if (!run_integer(*Dint))
        throw ConsistencyError("affine-hull path says measurable but the integer conditions fail at " +
                               v.conditions->with_groups.first_failure);
      v.notes.push_back("content from the integer conditions; both paths agree on measurability");
    } else {
      v.status = "measurable-unknown-content";
      v.notes.push_back("no lattice pluriphase data for the embedded system; content not computed");
    }
    return v;
  }

  // (c) nonlattice
  if (!v.lattice.is_lattice) {
    v.path = "c";
    v.reason = "nonlattice IFS: measurable with content equal to the average content";
    v.status = "measurable";
    if (p) {
      v.g = p->g();
      v.average = average_content(*p, ratios);
    } else {
      v.g = resolve_g(A, scene, opt, v.notes);
      double gv = 0.0;
      VolumeCurve c = gamma_curve(A, scene, *v.g, opt, gv);
      AverageContent ac;
      ac.value = average_content(c, gv, *v.g, v.d, v.D, ratios);
      const double hi = average_content(shifted(c, 1.0), gv, *v.g, v.d, v.D, ratios);
      const double lo = average_content(shifted(c, -1.0), gv, *v.g, v.d, v.D, ratios);
      v.content_error = 0.5 * std::abs(hi - lo);
      v.average = ac;
      v.notes.push_back("content from a sampled volume curve (" + c.method + ")");
    }
    v.content = v.average->value;
    return v;
  }

  if (p) {
    v.g = p->g();
    if (!Dint) {
      // (d) lattice, non-integer D
      v.path = "d";
      v.reason = "lattice IFS with pluriphase data and non-integer D";
      v.status = "not-measurable";
      const OscillationProfile prof = p_closed_form(*p, v.lattice);
      v.oscillation = oscillation(prof);
      v.average = average_content(*p, ratios, v.lattice);
      v.factor = content_factor(v.lattice, ratios, v.D);
      if (!(v.oscillation->amplitude > 0.0))
        throw ConsistencyError("closed-form profile is constant for non-integer D");
      return v;
    }
    // (e) lattice, integer D < d
    v.path = "e";
    v.reason = "lattice IFS with pluriphase data and integer D < d";
    v.status = run_integer(*Dint) ? "measurable" : "not-measurable";
    return v;
  }

  // (f) lattice without pluriphase data
  v.path = "f";
  v.reason = "lattice IFS without pluriphase data: profile estimated from a sampled volume curve";
  v.status = "undecided-numeric";
  v.g = resolve_g(A, scene, opt, v.notes);
  double gv = 0.0;
  VolumeCurve c = gamma_curve(A, scene, *v.g, opt, gv);
  const VolumeCurve up = shifted(c, 1.0), down = shifted(c, -1.0);
  std::vector<double> es, vs, errs;
  const int n = 64;
  for (int j = 0; j < n; ++j) {
    const double e = *v.g * std::pow(v.lattice.base, (j + 0.5) / n);
    es.push_back(e);
    vs.push_back(p_series(c, gv, v.d, v.D, *v.g, v.lattice, e).value);
    errs.push_back(0.5 * std::abs(p_series(up, gv, v.d, v.D, *v.g, v.lattice, e).value -
                                  p_series(down, gv, v.d, v.D, *v.g, v.lattice, e).value));
  }
  v.oscillation = oscillation(es, vs, errs);
  v.factor = content_factor(v.lattice, ratios, v.D);
  AverageContent ac;
  ac.value = average_content(c, gv, *v.g, v.d, v.D, ratios);
  v.average = ac;
  v.notes.push_back(v.oscillation->amplitude > v.oscillation->error ? "sampled profile oscillates beyond its error bar"
                                                                     : "sampled profile is constant within its error bar");
  return v;
}

}  // namespace minklab
