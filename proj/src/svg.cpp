#include "minklab/svg.hpp"

#include <cstdio>
#include <sstream>

#include "minklab/errors.hpp"
#include "minklab/region.hpp"

namespace minklab {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string word_label(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "." : "") + std::to_string(w[i]);
  return s;
}

}  // namespace

RenderResult render_svg(const Scene& scene, const RenderOptions& opt) {
  if (scene.dim() != 2) throw ValidationError("rendering supports planar scenes only (d = 2)");
  if (opt.depth < 0 || opt.depth > 8) throw ValidationError("render depth must lie in 0..8");
  const Region& O = scene.open_set;
  if (!O.is_bounded()) throw ValidationError("rendering needs a bounded open set");
  const BoundingBox& box = O.bounds();
  const double span = std::max(box.hi(0) - box.lo(0), box.hi(1) - box.lo(1));
  const double margin = 0.04 * span;
  const double x0 = box.lo(0) - margin, y1 = box.hi(1) + margin;
  const double scale = opt.width / (span + 2.0 * margin);
  const double w = (box.hi(0) - box.lo(0) + 2.0 * margin) * scale;
  const double h = (box.hi(1) - box.lo(1) + 2.0 * margin) * scale;
  auto px = [&](const Vec& p) { return fmt((p(0) - x0) * scale) + "," + fmt((y1 - p(1)) * scale); };

  std::vector<Vec> cloud;
  if (scene.gamma_polygons.empty()) {
    const GammaRegion gr = gamma(scene.ifs, O);
    QmcSequence seq(2, opt.seed);
    for (std::uint64_t k = 0; cloud.size() < opt.cloud_points && k < 1000 * opt.cloud_points; ++k) {
      Vec x = seq.point_in(k, box);
      if (gr.contains(x)) cloud.push_back(x);
    }
  }

  RenderResult out;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
  os << "<title>" << scene.name << " tiles to depth " << opt.depth << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (opt.outline_open_set && O.has_polygons()) {
    os << "<g class=\"open-set\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\">\n";
    for (const auto& poly : O.polygons()) {
      os << "<polygon points=\"";
      for (std::size_t i = 0; i < poly.size(); ++i) os << (i ? " " : "") << px(poly[i]);
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  static const char* palette[] = {"#1f4e79", "#2e75b6", "#5b9bd5", "#9dc3e6", "#bdd7ee", "#deebf7", "#eef5fb", "#f7fbff", "#ffffff"};
  std::vector<std::pair<Word, Similarity>> level{{Word{}, Similarity::identity(2)}};
  for (int depth = 0; depth <= opt.depth; ++depth) {
    os << "<g class=\"level\" data-depth=\"" << depth << "\" fill=\"" << palette[depth] << "\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
    std::vector<std::pair<Word, Similarity>> next;
    for (const auto& [word, map] : level) {
      ++out.tiles;
      os << "<g class=\"tile\" data-word=\"" << word_label(word) << "\">";
      if (!scene.gamma_polygons.empty()) {
        for (const auto& poly : scene.gamma_polygons) {
          os << "<polygon points=\"";
          for (std::size_t i = 0; i < poly.size(); ++i) os << (i ? " " : "") << px(map.apply(poly[i]));
          os << "\"/>";
          ++out.polygons;
        }
      } else {
        const double r = std::max(0.6, 1.2 * map.ratio());
        for (const auto& x : cloud) {
          const Vec y = map.apply(x);
          os << "<circle cx=\"" << fmt((y(0) - x0) * scale) << "\" cy=\"" << fmt((y1 - y(1)) * scale) << "\" r=\"" << fmt(r)
             << "\"/>";
          ++out.points;
        }
      }
      os << "</g>\n";
      if (depth < opt.depth)
        for (int i = 0; i < scene.ifs.size(); ++i) {
          Word c = word;
          c.push_back(i);
          next.emplace_back(std::move(c), map.compose(scene.ifs.map(i)));
        }
    }
    os << "</g>\n";
    level = std::move(next);
  }
  os << "</svg>\n";
  out.svg = os.str();
  return out;
}

}  // namespace minklab
