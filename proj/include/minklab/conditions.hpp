#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minklab/attractor.hpp"
#include "minklab/region.hpp"
#include "minklab/sampling.hpp"

namespace minklab {

enum class Verdict { Pass, Fail, NoViolationFound };

std::string to_string(Verdict v);

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::NoViolationFound;
  std::optional<Vec> counterexample;
  /// Map whose image the counterexample was drawn from.
  std::optional<int> map_index;
  /// Position of the counterexample in that map's sample stream.
  std::optional<std::uint64_t> sample_index;
  std::string detail;
  std::size_t samples_used = 0;
  double tolerance = 0.0;
};

struct SamplingOptions {
  std::size_t n_samples = 4000;
  double tol = 1e-9;
  std::uint64_t seed = kDefaultSeed;
  /// Rejection-sampling attempts allowed per requested sample.
  std::size_t attempts_per_sample = 1000;
};

/// Samples from each S_i O; flags points robustly inside some S_j O (j != i)
/// or robustly outside O.
ConditionReport check_osc(const IteratedFunctionSystem& ifs, const Region& open_set, const SamplingOptions& opt);

/// Searches a point cover of F at resolution tol for a point of O.
ConditionReport check_sosc(const Attractor& attractor, const Region& open_set, double tol);

/// Samples x in S_i O and flags d(x, S_i F) > d(x, F) + tol.
ConditionReport check_projection_condition(const Attractor& attractor, const Region& open_set,
                                           const SamplingOptions& opt);

/// Re-tests a reported OSC counterexample.
bool osc_violated_at(const IteratedFunctionSystem& ifs, const Region& open_set, int map_index, const Vec& x,
                     double tol);
/// Re-tests a reported projection-condition counterexample.
bool projection_violated_at(const Attractor& attractor, int map_index, const Vec& x, double tol);

struct GEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Vec witness;
  std::size_t cells = 0;
};

/// Certified bracket of g = sup { d(x,F) : x in Γ } with upper - lower <= tol,
/// by best-first cell refinement using the 1-Lipschitz bound d(c) + radius.
GEstimate estimate_g(const Attractor& attractor, const GammaRegion& gamma_region, double tol,
                     std::size_t max_cells = 4'000'000);

struct Tile {
  Word word;
  Region region;
};

/// All tiles S_w Γ for |w| <= max_depth, in shortlex order.
std::vector<Tile> tiles(const IteratedFunctionSystem& ifs, const GammaRegion& gamma_region, int max_depth);

}  // namespace minklab
