#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/conditions.hpp"
#include "minklab/measurability.hpp"
#include "minklab/parvol.hpp"
#include "minklab/pluriphase.hpp"
#include "minklab/scene.hpp"

namespace minklab {

inline constexpr const char* kChecksSchema = "minklab.checks/1";
inline constexpr const char* kReportSchema = "minklab.report/1";

struct CheckOptions {
  SamplingOptions osc;
  /// The projection condition is costly; it gets its own sample count.
  std::size_t projection_samples = 1000;
  /// Resolution of the strong-OSC point cover, relative to the diameter of O.
  double sosc_tol = 1e-3;
  /// Tolerance of the projection test, relative to the diameter of O.
  double projection_tol = 1e-6;
  /// Tolerance of the g estimate relative to the diameter of O; unset selects
  /// 1e-6 for d <= 2 and 1e-3 above.
  std::optional<double> g_tol;
};

struct CheckReport {
  ConditionReport osc;
  ConditionReport sosc;
  ConditionReport projection;
  GEstimate g;
  std::optional<double> declared_g;
  double g_tol = 0.0;
  bool g_consistent = true;

  bool pass() const;
  Json to_json() const;
};

/// OSC, strong OSC, projection condition and g (estimated, or verified
/// against the declared value).
CheckReport run_checks(const Scene& scene, const CheckOptions& options = {});

/// Curve CSV with the columns epsilon,value,std_error (17 significant digits).
std::string curve_csv(const VolumeCurve& curve);
/// Reads the CSV written by curve_csv.
VolumeCurve read_curve_csv(const std::string& text);

struct PipelineOptions {
  CheckOptions checks;
  VolumeMethod method = VolumeMethod::qmc(200'000);
  int curve_points = 120;
  /// Smallest sampled ε as a fraction of g.
  double curve_min_fraction = 0.02;
  int render_depth = 3;
  FitOptions fit;
};

struct StageRecord {
  std::string name;
  std::string status;
  std::string detail;
};

struct PipelineReport {
  std::string name;
  std::vector<StageRecord> stages;
  std::optional<MeasurabilityVerdict> verdict;
  std::optional<PluriphaseData> pluriphase;
  std::vector<std::string> artifacts;

  Json to_json() const;
};

/// checks -> volumes -> pluriphase (declared or fitted) -> decide -> render,
/// writing artifacts into outdir. A failing stage rethrows its error with the
/// stage name prepended.
PipelineReport run_pipeline(const Scene& scene, const std::string& outdir, const PipelineOptions& options = {});

std::vector<std::string> examples_list();
PipelineReport examples_run(const std::string& name, const std::string& outdir, const PipelineOptions& options = {});

}  // namespace minklab
