#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/conditions.hpp"
#include "minklab/parvol.hpp"
#include "minklab/renewal.hpp"
#include "minklab/scene.hpp"

namespace minklab {

inline constexpr const char* kVerdictSchema = "minklab.verdict/1";

struct DecideOptions {
  /// Replaces the pluriphase block of the scene when set.
  std::optional<PluriphaseData> pluriphase;
  SamplingOptions osc;
  /// Sampler for the numeric paths (trivial attractor, nonlattice without data, numeric profile).
  VolumeMethod method = VolumeMethod::qmc(200'000);
  int curve_points = 48;
  /// Absolute tolerance of the g estimate, relative to the diameter of O.
  double g_tol = 1e-6;
};

struct MeasurabilityVerdict {
  /// "measurable", "not-measurable", "measurable-unknown-content" or "undecided-numeric".
  std::string status;
  /// Decision path "a" .. "f".
  std::string path;
  std::string reason;
  int d = 0;
  double D = 0.0;
  std::optional<int> integer_D;
  int affine_dimension = 0;
  LatticeInfo lattice;
  std::optional<double> g;
  std::optional<double> content;
  std::optional<Surd> content_exact;
  std::optional<double> content_error;
  std::optional<double> factor;
  std::optional<Surd> factor_exact;
  std::optional<double> C;
  std::optional<Surd> C_exact;
  std::optional<AverageContent> average;
  std::optional<OscillationSummary> oscillation;
  std::optional<IntegerConditionReport> conditions;
  ConditionReport osc;
  std::vector<std::string> notes;

  Json to_json() const;
};

/// Measurability decision tree for a scene satisfying the open set condition.
/// Throws ConditionFailure when OSC sampling finds a violation and
/// ConsistencyError when the affine-hull and integer-condition paths disagree.
MeasurabilityVerdict decide_measurability(const Scene& scene, const DecideOptions& options = {});

/// Exact ln r / Σ r_i^D ln r_i for a rational lattice base and integer D.
std::optional<Surd> exact_content_factor(const LatticeInfo& lat, int D);

Json to_json(const OscillationSummary& s);
Json to_json(const IntegerConditionReport& r);
Json to_json(const ConditionReport& r);
Json to_json(const LatticeInfo& lat);

}  // namespace minklab
