#include <functional>
#include <map>

#include "minklab/errors.hpp"
#include "minklab/scene.hpp"

namespace minklab {

namespace {

Json map2(const char* ratio, const Json& translation, double rotation_deg = 0.0) {
  Json m = {{"ratio", ratio}, {"translation", translation}};
  if (rotation_deg != 0.0) m["rotation_deg"] = rotation_deg;
  return m;
}

Json polygon(const Json& vertices) { return {{"type", "polygon"}, {"vertices", vertices}}; }

Json gasket_maps() {
  return Json::array({map2("1/2", {0, 0}), map2("1/2", {"1/2", 0}), map2("1/2", {"1/4", "sqrt(3)/4"})});
}

const Json kHull = Json::array({{0, 0}, {1, 0}, {"1/2", "sqrt(3)/2"}});

Json gasket_central_base() {
  Json doc;
  doc["name"] = "gasket-central";
  doc["dim"] = 2;
  doc["maps"] = gasket_maps();
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1}}};
  doc["open_set"] = polygon(Json::array({{0, 0},
                                         {"1/2", "-sqrt(3)/6"},
                                         {1, 0},
                                         {1, "sqrt(3)/3"},
                                         {"1/2", "sqrt(3)/2"},
                                         {0, "sqrt(3)/3"}}));
  doc["g"] = "sqrt(3)/6";
  doc["gamma_polygons"] = Json::array({
      Json::array({{"1/2", 0}, {"1/4", "-sqrt(3)/12"}, {"1/2", "-sqrt(3)/6"}, {"3/4", "-sqrt(3)/12"}}),
      Json::array({{"3/4", "sqrt(3)/4"}, {1, "sqrt(3)/6"}, {1, "sqrt(3)/3"}, {"3/4", "5*sqrt(3)/12"}}),
      Json::array({{"1/4", "sqrt(3)/4"}, {"1/4", "5*sqrt(3)/12"}, {0, "sqrt(3)/3"}, {0, "sqrt(3)/6"}}),
  });
  return doc;
}

Json gasket_hull() {
  Json doc;
  doc["name"] = "gasket-hull";
  doc["description"] = "Sierpinski gasket with its convex hull as open set; monophase with respect to the central triangle";
  doc["dim"] = 2;
  doc["maps"] = gasket_maps();
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1}}};
  doc["open_set"] = polygon(kHull);
  doc["g"] = "sqrt(3)/12";
  doc["gamma_polygons"] = Json::array({Json::array({{"1/2", 0}, {"3/4", "sqrt(3)/4"}, {"1/4", "sqrt(3)/4"}})});
  return doc;
}

Json gasket_central() {
  Json doc = gasket_central_base();
  doc["description"] = "Sierpinski gasket with the hexagonal central open set and its declared pluriphase data";
  doc["pluriphase"] = {{"breakpoints", {"sqrt(3)/12", "sqrt(3)/6"}},
                       {"coeffs", Json::array({{"6*sqrt(3)", 0, 0}, {"6*sqrt(3)", -3, "sqrt(3)/4"}})},
                       {"gamma_volume", "sqrt(3)/4"},
                       {"provenance", "declared"}};
  doc["notes"] = {"pluriphase block as tabulated for this open set; the geometric volume of F_eps within the three "
                  "rhombi is recorded in gasket-central-geometric"};
  return doc;
}

Json gasket_central_geometric() {
  Json doc = gasket_central_base();
  doc["name"] = "gasket-central-geometric";
  doc["description"] = "Sierpinski gasket with the hexagonal central open set and pluriphase data measured from the rhombi";
  doc["pluriphase"] = {{"breakpoints", {"sqrt(3)/12", "sqrt(3)/6"}},
                       {"coeffs", Json::array({{"3*sqrt(3)", 0, 0}, {"-3*sqrt(3)", 3, "-sqrt(3)/8"}})},
                       {"gamma_volume", "sqrt(3)/8"},
                       {"provenance", "declared"}};
  return doc;
}

Json carpet_hull() {
  Json doc;
  doc["name"] = "carpet-hull";
  doc["description"] = "Sierpinski carpet with the open unit square";
  doc["dim"] = 2;
  Json maps = Json::array();
  const char* third[] = {"0", "1/3", "2/3"};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      if (i != 1 || j != 1) maps.push_back(map2("1/3", {third[i], third[j]}));
  doc["maps"] = maps;
  doc["lattice"] = {{"base", "1/3"}, {"exponents", {1, 1, 1, 1, 1, 1, 1, 1}}};
  doc["open_set"] = {{"type", "box"}, {"min", {0, 0}}, {"max", {1, 1}}};
  doc["g"] = "1/6";
  doc["gamma_polygons"] = Json::array({Json::array({{"1/3", "1/3"}, {"2/3", "1/3"}, {"2/3", "2/3"}, {"1/3", "2/3"}})});
  return doc;
}

Json koch_hull() {
  Json doc;
  doc["name"] = "koch-hull";
  doc["description"] = "Koch curve with the open isosceles triangle over the unit segment";
  doc["dim"] = 2;
  doc["maps"] = Json::array({map2("1/3", {0, 0}), map2("1/3", {"1/3", 0}, 60.0),
                             map2("1/3", {"1/2", "sqrt(3)/6"}, -60.0), map2("1/3", {"2/3", 0})});
  doc["lattice"] = {{"base", "1/3"}, {"exponents", {1, 1, 1, 1}}};
  doc["open_set"] = polygon(Json::array({{0, 0}, {1, 0}, {"1/2", "sqrt(3)/6"}}));
  doc["gamma_polygons"] = Json::array({
      Json::array({{"1/6", "sqrt(3)/18"}, {"1/3", 0}, {"1/3", "sqrt(3)/9"}}),
      Json::array({{"1/3", 0}, {"2/3", 0}, {"1/2", "sqrt(3)/6"}}),
      Json::array({{"2/3", 0}, {"5/6", "sqrt(3)/18"}, {"2/3", "sqrt(3)/9"}}),
  });
  return doc;
}

Json square_r3() {
  Json doc;
  doc["name"] = "square-r3";
  doc["description"] = "Unit square in R^3 as the attractor of four half-scale maps, with a slab open set";
  doc["dim"] = 3;
  doc["maps"] = Json::array({
      Json{{"ratio", "1/2"}, {"translation", {0, 0, 0}}},
      Json{{"ratio", "1/2"}, {"translation", {"1/2", 0, 0}}},
      Json{{"ratio", "1/2"}, {"translation", {0, "1/2", 0}}},
      Json{{"ratio", "1/2"}, {"translation", {"1/2", "1/2", 0}}},
  });
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1, 1}}};
  doc["open_set"] = {{"type", "box"}, {"min", {0, 0, "-1/2"}}, {"max", {1, 1, "1/2"}}};
  doc["g"] = "1/2";
  doc["pluriphase"] = {{"breakpoints", {"1/4", "1/2"}},
                       {"coeffs", Json::array({{0, 0, 0, 0}, {0, 0, 2, "-1/2"}})},
                       {"gamma_volume", "1/2"},
                       {"provenance", "declared"}};
  return doc;
}

Json gasket_disk() {
  Json doc;
  doc["name"] = "gasket-disk";
  doc["description"] = "Sierpinski gasket with a large disk as candidate open set; the images overlap";
  doc["dim"] = 2;
  doc["maps"] = gasket_maps();
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1}}};
  doc["open_set"] = {{"type", "regular_polygon"}, {"center", {"1/2", "sqrt(3)/6"}}, {"radius", 2}, {"sides", 256}};
  doc["notes"] = {"the disk is represented by an inscribed regular 256-gon"};
  return doc;
}

Json gasket_skewed() {
  Json doc;
  doc["name"] = "gasket-skewed";
  doc["description"] = "Sierpinski gasket with its hull translated sideways; points of S_i O lie closer to other pieces";
  doc["dim"] = 2;
  doc["maps"] = gasket_maps();
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1}}};
  doc["open_set"] = polygon(Json::array({{"3/10", 0}, {"13/10", 0}, {"4/5", "sqrt(3)/2"}}));
  return doc;
}

Json gasket_nonlattice() {
  Json doc;
  doc["name"] = "gasket-nonlattice";
  doc["description"] = "Gasket-like attractor with ratios 1/2, 1/3, 1/4 placed in the corners of the unit triangle";
  doc["dim"] = 2;
  doc["maps"] = Json::array(
      {map2("1/2", {0, 0}), map2("1/3", {"2/3", 0}), map2("1/4", {"3/8", "3*sqrt(3)/8"})});
  doc["open_set"] = polygon(kHull);
  return doc;
}

Json cantor_nonlattice() {
  Json doc;
  doc["name"] = "cantor-nonlattice";
  doc["description"] = "Cantor-like set of the maps x/2 and x/3 + 2/3 on the open unit interval";
  doc["dim"] = 1;
  doc["maps"] = Json::array({Json{{"ratio", "1/2"}, {"translation", {0}}}, Json{{"ratio", "1/3"}, {"translation", {"2/3"}}}});
  doc["open_set"] = {{"type", "box"}, {"min", {0}}, {"max", {1}}};
  doc["g"] = "1/12";
  doc["pluriphase"] = {{"breakpoints", {"1/12"}},
                       {"coeffs", Json::array({{2, 0}})},
                       {"gamma_volume", "1/6"},
                       {"provenance", "declared"}};
  return doc;
}

Json square_full() {
  Json doc;
  doc["name"] = "square-full";
  doc["description"] = "Unit square as the attractor of four half-scale maps in the plane";
  doc["dim"] = 2;
  doc["maps"] = Json::array({map2("1/2", {0, 0}), map2("1/2", {"1/2", 0}), map2("1/2", {0, "1/2"}),
                             map2("1/2", {"1/2", "1/2"})});
  doc["lattice"] = {{"base", "1/2"}, {"exponents", {1, 1, 1, 1}}};
  doc["open_set"] = {{"type", "box"}, {"min", {0, 0}}, {"max", {1, 1}}};
  return doc;
}

const std::map<std::string, std::function<Json()>>& registry() {
  static const std::map<std::string, std::function<Json()>> r = {
      {"koch-hull", koch_hull},
      {"gasket-hull", gasket_hull},
      {"carpet-hull", carpet_hull},
      {"gasket-central", gasket_central},
      {"gasket-central-geometric", gasket_central_geometric},
      {"square-r3", square_r3},
      {"gasket-disk", gasket_disk},
      {"gasket-skewed", gasket_skewed},
      {"gasket-nonlattice", gasket_nonlattice},
      {"cantor-nonlattice", cantor_nonlattice},
      {"square-full", square_full},
  };
  return r;
}

}  // namespace

std::vector<std::string> corpus_names() {
  return {"koch-hull",         "gasket-hull",   "carpet-hull",   "gasket-central",
          "gasket-central-geometric", "square-r3", "gasket-disk", "gasket-skewed",
          "gasket-nonlattice", "cantor-nonlattice", "square-full"};
}

Json corpus_document(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw ValidationError("unknown example scene \"" + name + "\"");
  Json doc = it->second();
  doc["schema"] = kSceneSchema;
  return doc;
}

Scene corpus_scene(const std::string& name) { return parse_scene(corpus_document(name)); }

}  // namespace minklab
