#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "minklab/exact.hpp"
#include "minklab/lattice.hpp"
#include "minklab/pluriphase.hpp"
#include "minklab/region.hpp"
#include "minklab/similarity.hpp"

namespace minklab {

using Json = nlohmann::json;

inline constexpr const char* kSceneSchema = "minklab.scene/1";

/// IFS, feasible open set and optional declared data, parsed from scene JSON.
struct Scene {
  Scene(IteratedFunctionSystem system, Region open) : ifs(std::move(system)), open_set(std::move(open)) {}

  std::string name;
  std::string description;
  std::vector<std::string> notes;
  IteratedFunctionSystem ifs;
  Region open_set;
  std::optional<double> g;
  std::optional<Surd> g_exact;
  std::optional<std::pair<std::string, std::vector<int>>> lattice_declaration;
  std::optional<PluriphaseData> pluriphase;
  /// Optional exact outline of Γ for rendering.
  std::vector<std::vector<Vec>> gamma_polygons;
  /// Normalized source document; emit returns it unchanged.
  Json source;

  int dim() const { return ifs.dim(); }
};

/// Derived dimension and lattice data of a scene.
struct SceneInfo {
  double D = 0.0;
  std::optional<int> integer_D;
  LatticeInfo lattice;
};

Scene parse_scene(const Json& doc);
Scene parse_scene_text(const std::string& text);
Scene load_scene(const std::string& path);
Json emit_scene(const Scene& scene);

SceneInfo analyze(const Scene& scene);

/// Pluriphase block from JSON; D is the similarity dimension of the scene.
PluriphaseData parse_pluriphase(const Json& block, int d, double D);
Json emit_pluriphase(const PluriphaseData& p);

/// Deterministic JSON text: sorted keys, floats with 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double x);

/// Number or exact-expression string as a double.
double json_number(const Json& v, const std::string& where);

/// Names of the built-in scenes.
std::vector<std::string> corpus_names();
Json corpus_document(const std::string& name);
Scene corpus_scene(const std::string& name);

}  // namespace minklab
