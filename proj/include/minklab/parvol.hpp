#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minklab/attractor.hpp"
#include "minklab/region.hpp"
#include "minklab/sampling.hpp"

namespace minklab {

/// Where parallel volume is measured: all of R^d, a region, or Γ.
class Domain {
 public:
  static Domain whole_space(int dim);
  static Domain of(const Region& region);
  static Domain of(const GammaRegion& gamma_region);

  bool is_whole_space() const { return whole_; }
  int dim() const { return dim_; }
  bool contains(const Vec& x) const;
  BoxRelation relation(const BoundingBox& box) const;
  /// Bounding box, or nullopt for the whole space.
  std::optional<BoundingBox> bounds() const;
  const std::string& label() const { return label_; }

 private:
  Domain() = default;
  bool whole_ = true;
  int dim_ = 0;
  std::optional<Region> region_;
  std::optional<GammaRegion> gamma_;
  std::string label_;
};

struct VolumeMethod {
  enum class Kind { Grid, Qmc };
  Kind kind = Kind::Qmc;
  double h = 1.0 / 512.0;
  std::size_t n = 200'000;
  std::uint64_t seed = kDefaultSeed;
  int replicates = 8;
  std::size_t max_cells = 4'000'000'000ULL;
  std::size_t max_samples = 1'000'000'000ULL;

  static VolumeMethod grid(double h);
  static VolumeMethod qmc(std::size_t n, std::uint64_t seed = kDefaultSeed);
  std::string tag() const;
};

struct VolumeCurve {
  std::vector<double> epsilons;
  std::vector<double> values;
  /// Replicate standard errors (zero for the grid method).
  std::vector<double> std_errors;
  /// Deterministic error bounds (grid method: boundary-cell volume).
  std::vector<double> error_bounds;
  std::string method;
  std::string domain;
  double resolution = 0.0;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;

  std::size_t size() const { return epsilons.size(); }
};

/// λ_d(F_ε ∩ domain) for each ε in eps (any order; output sorted ascending).
/// dist_tol <= 0 selects min(ε)/1000, further capped at h/8 for grids;
/// larger values than min(ε)/10 are rejected.
VolumeCurve parallel_volume(const Attractor& attractor, const Domain& domain, std::vector<double> eps,
                            const VolumeMethod& method, double dist_tol = 0.0);

/// Geometric ε grid g * rho^j, j = 0..n-1 (descending input, returned ascending).
std::vector<double> geometric_epsilons(double g, double rho, int n);

struct ResidualEstimate {
  double residual = 0.0;
  double std_error = 0.0;
  std::vector<double> terms;
  std::vector<std::string> labels;
};

/// |λ(F_ε) - Σ λ(F_ε ∩ S_iO) - λ(F_ε ∩ Γ) - λ(F_ε \ O)| on one sample set.
ResidualEstimate decomposition_residual(const Attractor& attractor, const Region& open_set, double eps,
                                        std::size_t n, std::uint64_t seed = kDefaultSeed, int replicates = 8);

/// |λ(F_ε ∩ S_iO) - r_i^d λ(F_{ε/r_i} ∩ O)| with common sample points.
ResidualEstimate scaling_residual(const Attractor& attractor, const Region& open_set, int i, double eps,
                                  std::size_t n, std::uint64_t seed = kDefaultSeed, int replicates = 8);

}  // namespace minklab
