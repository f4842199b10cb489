#pragma once

#include <cstdint>
#include <string>

#include "minklab/sampling.hpp"
#include "minklab/scene.hpp"

namespace minklab {

struct RenderOptions {
  int depth = 3;
  int width = 800;
  bool outline_open_set = true;
  /// Points drawn per tile when Γ has no polygon outline.
  std::size_t cloud_points = 4000;
  std::uint64_t seed = kDefaultSeed;
};

struct RenderResult {
  std::string svg;
  std::size_t tiles = 0;
  std::size_t polygons = 0;
  std::size_t points = 0;
};

/// Tiles S_w Γ for |w| <= depth of a planar scene. Each tile is one <g> element
/// holding its polygons, or its sampled points when Γ has no outline.
RenderResult render_svg(const Scene& scene, const RenderOptions& options = {});

}  // namespace minklab
