#include "minklab/scene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::optional<Surd> exact_of(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Surd(static_cast<long long>(v.get<std::int64_t>()));
  if (v.is_string()) {
    try {
      return parse_exact(v.get<std::string>());
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  return std::nullopt;
}

Vec json_vec(const Json& v, int d, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    fail(where, "expected an array of " + std::to_string(d) + " coordinates");
  Vec x(d);
  for (int k = 0; k < d; ++k) x(k) = json_number(v[static_cast<std::size_t>(k)], where + "[" + std::to_string(k) + "]");
  return x;
}

Similarity parse_map(const Json& m, int d, const std::string& where) {
  const Json& rj = member(m, "ratio", where);
  const double r = json_number(rj, where + ".ratio");
  if (!(r > 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << "ratio " << r << " is not contractive; ratios must lie in (0, 1)";
    fail(where + ".ratio", os.str());
  }
  Vec b = m.contains("translation") ? json_vec(m["translation"], d, where + ".translation") : Vec::Zero(d);
  std::optional<Similarity> s;
  if (m.contains("matrix")) {
    const Json& mj = m["matrix"];
    if (!mj.is_array() || static_cast<int>(mj.size()) != d) fail(where + ".matrix", "expected a d x d array");
    Mat Q(d, d);
    for (int i = 0; i < d; ++i) {
      Vec row = json_vec(mj[static_cast<std::size_t>(i)], d, where + ".matrix[" + std::to_string(i) + "]");
      for (int j = 0; j < d; ++j) Q(i, j) = row(j);
    }
    try {
      s.emplace(r, Q, b);
    } catch (const ValidationError& e) {
      fail(where + ".matrix", e.what());
    }
  } else if (d == 2) {
    const double angle = m.contains("rotation_deg") ? json_number(m["rotation_deg"], where + ".rotation_deg") : 0.0;
    s.emplace(Similarity::planar(r, angle, b(0), b(1)));
    if (m.value("reflect", false)) {
      Mat Q = s->orthogonal();
      Mat F = Mat::Identity(2, 2);
      F(1, 1) = -1.0;
      s.emplace(r, Mat(Q * F), b);
    }
  } else {
    if (m.contains("rotation_deg")) fail(where, "rotation_deg is only valid for d = 2; use \"matrix\"");
    s.emplace(Similarity::scaling(r, b));
  }
  if (auto e = exact_of(rj, where + ".ratio"); e && e->is_rational()) s->set_exact_ratio(e->rational_part());
  return *s;
}

Region parse_region(const Json& o, int d, const std::string& where) {
  const std::string type = member(o, "type", where).get<std::string>();
  const bool closed = o.value("closed", false);
  if (type == "polygon") {
    if (d != 2) fail(where, "polygon open sets need d = 2");
    const Json& vs = member(o, "vertices", where);
    if (!vs.is_array() || vs.size() < 3) fail(where + ".vertices", "a polygon needs at least 3 vertices");
    std::vector<Vec> verts;
    for (std::size_t i = 0; i < vs.size(); ++i) verts.push_back(json_vec(vs[i], 2, where + ".vertices[" + std::to_string(i) + "]"));
    try {
      return Region::convex_polygon(verts, closed);
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  if (type == "regular_polygon") {
    if (d != 2) fail(where, "regular_polygon open sets need d = 2");
    const Vec c = json_vec(member(o, "center", where), 2, where + ".center");
    const double R = json_number(member(o, "radius", where), where + ".radius");
    const int n = member(o, "sides", where).get<int>();
    const double phase = o.contains("phase_deg") ? json_number(o["phase_deg"], where + ".phase_deg") : 0.0;
    if (n < 3 || !(R > 0.0)) fail(where, "regular_polygon needs sides >= 3 and radius > 0");
    std::vector<Vec> verts;
    for (int k = 0; k < n; ++k) {
      const double a = (phase / 180.0 + 2.0 * k / n) * std::numbers::pi;
      Vec v(2);
      v << c(0) + R * std::cos(a), c(1) + R * std::sin(a);
      verts.push_back(v);
    }
    return Region::convex_polygon(verts, closed);
  }
  if (type == "box") {
    const Vec lo = json_vec(member(o, "min", where), d, where + ".min");
    const Vec hi = json_vec(member(o, "max", where), d, where + ".max");
    try {
      return Region::box(lo, hi, closed);
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  if (type == "polytope") {
    const Json& fs = member(o, "faces", where);
    std::vector<HalfSpace> faces;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string w = where + ".faces[" + std::to_string(i) + "]";
      faces.push_back({json_vec(member(fs[i], "normal", w), d, w + ".normal"), json_number(member(fs[i], "offset", w), w + ".offset")});
    }
    try {
      return Region::polytope(faces, closed);
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  if (type == "union") {
    const Json& ps = member(o, "parts", where);
    if (!ps.is_array() || ps.empty()) fail(where + ".parts", "a union needs at least one part");
    std::vector<Region> parts;
    for (std::size_t i = 0; i < ps.size(); ++i) parts.push_back(parse_region(ps[i], d, where + ".parts[" + std::to_string(i) + "]"));
    return Region::unite(parts);
  }
  fail(where + ".type", "unknown open-set type \"" + type + "\" (expected polygon, regular_polygon, box, polytope or union)");
}

double scene_dimension(const IteratedFunctionSystem& ifs) {
  if (auto ex = ifs.exact_ratios())
    if (auto n = exact_integer_dimension(*ex)) return static_cast<double>(*n);
  return similarity_dimension(ifs.ratios());
}

void write_json(std::ostringstream& os, const Json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string end_pad(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json(os, it.value(), indent, level + 1);
      }
      os << nl << end_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << "," << nl;
        os << pad;
        write_json(os, j[i], indent, level + 1);
      }
      os << nl << end_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

double json_number(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_exact(v.get<std::string>()).to_double();
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected a number or an exact expression string such as \"1/2\"");
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write_json(os, j, indent, 0);
  return os.str();
}

PluriphaseData parse_pluriphase(const Json& block, int d, double D) {
  const std::string where = "pluriphase";
  const Json& bj = member(block, "breakpoints", where);
  const Json& cj = member(block, "coeffs", where);
  const Json& gj = member(block, "gamma_volume", where);
  if (!bj.is_array() || bj.empty()) fail(where + ".breakpoints", "expected a nonempty array a_1..a_M");
  if (!cj.is_array() || cj.size() != bj.size())
    fail(where + ".coeffs", "expected one coefficient row per breakpoint (" + std::to_string(bj.size()) + ")");
  PluriphaseData p;
  p.ambient_dim = d;
  p.similarity_dim = D;
  p.provenance = block.value("provenance", std::string("declared"));
  ExactPluriphase ex;
  bool exact = true;
  std::int64_t radicand = 0;
  auto take = [&](const Json& v, const std::string& w) {
    auto e = exact_of(v, w);
    if (!e) {
      exact = false;
      return Surd(0);
    }
    if (e->radicand() != 0) {
      if (radicand != 0 && radicand != e->radicand()) exact = false;
      radicand = e->radicand();
    }
    return *e;
  };
  for (std::size_t i = 0; i < bj.size(); ++i) {
    const std::string w = where + ".breakpoints[" + std::to_string(i) + "]";
    p.breakpoints.push_back(json_number(bj[i], w));
    ex.breakpoints.push_back(take(bj[i], w));
  }
  for (std::size_t m = 0; m < cj.size(); ++m) {
    const std::string w = where + ".coeffs[" + std::to_string(m) + "]";
    if (!cj[m].is_array() || static_cast<int>(cj[m].size()) != d + 1)
      fail(w, "expected d+1 = " + std::to_string(d + 1) + " coefficients κ_{m,0..d}");
    std::vector<double> row;
    std::vector<Surd> erow;
    for (std::size_t k = 0; k < cj[m].size(); ++k) {
      const std::string wk = w + "[" + std::to_string(k) + "]";
      row.push_back(json_number(cj[m][k], wk));
      erow.push_back(take(cj[m][k], wk));
    }
    p.coeffs.push_back(std::move(row));
    ex.coeffs.push_back(std::move(erow));
  }
  p.gamma_volume = json_number(gj, where + ".gamma_volume");
  ex.gamma_volume = take(gj, where + ".gamma_volume");
  if (exact) p.exact = std::move(ex);
  return p;
}

Json emit_pluriphase(const PluriphaseData& p) {
  Json out;
  out["provenance"] = p.provenance;
  Json bps = Json::array(), rows = Json::array();
  for (int m = 1; m <= p.pieces(); ++m) {
    bps.push_back(p.exact ? Json(p.a_exact(m).to_string()) : Json(p.a(m)));
    Json row = Json::array();
    for (int k = 0; k <= p.ambient_dim; ++k)
      row.push_back(p.exact ? Json(p.kappa_exact(m, k).to_string()) : Json(p.kappa(m, k)));
    rows.push_back(row);
  }
  out["breakpoints"] = bps;
  out["coeffs"] = rows;
  out["gamma_volume"] = p.exact ? Json(p.exact->gamma_volume.to_string()) : Json(p.gamma_volume);
  return out;
}

Scene parse_scene(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("scene: expected a JSON object");
  if (doc.contains("schema") && doc["schema"] != kSceneSchema)
    fail("scene.schema", "unsupported schema " + doc["schema"].dump() + " (expected \"" + kSceneSchema + "\")");
  const Json& dj = member(doc, "dim", "scene");
  if (!dj.is_number_integer() || dj.get<int>() < 1 || dj.get<int>() > kMaxDim)
    fail("scene.dim", "dimension must be an integer in 1.." + std::to_string(kMaxDim));
  const int d = dj.get<int>();
  const Json& mj = member(doc, "maps", "scene");
  if (!mj.is_array() || mj.size() < 2)
    fail("scene.maps", "a scene needs at least two maps (N >= 2), got " + std::to_string(mj.is_array() ? mj.size() : 0));
  std::vector<Similarity> maps;
  for (std::size_t i = 0; i < mj.size(); ++i) maps.push_back(parse_map(mj[i], d, "maps[" + std::to_string(i) + "]"));
  IteratedFunctionSystem ifs = [&] {
    try {
      return IteratedFunctionSystem(maps);
    } catch (const ValidationError& e) {
      fail("scene.maps", e.what());
    }
  }();
  Region open = parse_region(member(doc, "open_set", "scene"), d, "open_set");
  Scene s(std::move(ifs), std::move(open));
  s.name = doc.value("name", std::string("unnamed"));
  s.description = doc.value("description", std::string());
  if (doc.contains("notes"))
    for (const auto& n : doc["notes"]) s.notes.push_back(n.get<std::string>());
  if (doc.contains("g")) {
    s.g = json_number(doc["g"], "scene.g");
    s.g_exact = exact_of(doc["g"], "scene.g");
    if (!(*s.g > 0.0)) fail("scene.g", "g must be positive");
  }
  if (doc.contains("lattice")) {
    const Json& l = doc["lattice"];
    const Json& base = member(l, "base", "lattice");
    const std::string b = base.is_string() ? base.get<std::string>() : format_double(base.get<double>());
    std::vector<int> exps;
    for (const auto& e : member(l, "exponents", "lattice")) exps.push_back(e.get<int>());
    s.lattice_declaration = std::make_pair(b, exps);
  }
  if (doc.contains("pluriphase")) s.pluriphase = parse_pluriphase(doc["pluriphase"], d, scene_dimension(s.ifs));
  if (doc.contains("gamma_polygons")) {
    if (d != 2) fail("scene.gamma_polygons", "outlines are only supported for d = 2");
    const Json& gp = doc["gamma_polygons"];
    for (std::size_t i = 0; i < gp.size(); ++i) {
      std::vector<Vec> poly;
      for (std::size_t k = 0; k < gp[i].size(); ++k)
        poly.push_back(json_vec(gp[i][k], 2, "gamma_polygons[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
      s.gamma_polygons.push_back(std::move(poly));
    }
  }
  s.source = doc;
  s.source["schema"] = kSceneSchema;
  return s;
}

Scene parse_scene_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("scene: malformed JSON: ") + e.what());
  }
  return parse_scene(doc);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str());
}

Json emit_scene(const Scene& scene) { return scene.source; }

SceneInfo analyze(const Scene& scene) {
  SceneInfo info;
  const auto ratios = scene.ifs.ratios();
  const auto exact = scene.ifs.exact_ratios();
  if (exact) info.integer_D = exact_integer_dimension(*exact);
  info.D = info.integer_D ? static_cast<double>(*info.integer_D) : similarity_dimension(ratios);
  if (scene.lattice_declaration) {
    const Surd b = parse_exact(scene.lattice_declaration->first);
    std::optional<Rational> eb;
    if (b.is_rational()) eb = b.rational_part();
    info.lattice = verify_lattice(ratios, info.D, b.to_double(), scene.lattice_declaration->second, eb, exact);
    info.lattice.declared = true;
  } else {
    info.lattice = classify_lattice(ratios, info.D);
    if (exact) attach_exact_base(info.lattice, *exact);
  }
  return info;
}

}  // namespace minklab
