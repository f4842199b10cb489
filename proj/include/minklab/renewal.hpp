#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minklab/exact.hpp"
#include "minklab/lattice.hpp"
#include "minklab/parvol.hpp"
#include "minklab/pluriphase.hpp"

namespace minklab {

/// L_m(ε) = ceil(log_r(a_m/ε)); values within 1e-12 of an integer snap first.
long level_index(const PluriphaseData& p, const LatticeInfo& lat, int m, double eps);
/// Exact ceiling when p carries exact data and lat an exact base.
long level_index_exact(const PluriphaseData& p, const LatticeInfo& lat, int m, const Surd& eps);

/// Partition of (rg, g] into I_1..I_Q on which every L_m is constant.
struct BreakStructure {
  double lower = 0.0;
  double upper = 0.0;
  /// Interior boundaries; I_q = (cuts[q-2], cuts[q-1]] with lower/upper at the ends.
  std::vector<double> cuts;
  std::optional<std::vector<Surd>> exact_cuts;
  /// groups[q-1] = U_q as 1-based piece indices; the last group holds the jump-free indices.
  std::vector<std::vector<int>> groups;
  /// levels[q-1][m-1] = L_m on I_q.
  std::vector<std::vector<long>> levels;
  std::vector<long> level_at_g;
  bool exact = false;

  int Q() const { return static_cast<int>(cuts.size()) + 1; }
  double left(int q) const;
  double right(int q) const;
  /// 1-based q with ε in I_q; ε must lie in (rg, g].
  int interval_of(double eps) const;
};

BreakStructure break_structure(const PluriphaseData& p, const LatticeInfo& lat);

/// Multiplicatively periodic p on its fundamental interval (rg, g].
struct OscillationProfile {
  int ambient_dim = 0;
  double similarity_dim = 0.0;
  double r = 0.0;
  double g = 0.0;
  bool integer_branch = false;
  /// D within 1e-9 of an integer without an exact declaration.
  bool integer_ambiguous = false;
  BreakStructure breaks;
  /// beta[q-1][k] = β_{k,q}; in the integer branch beta[q-1][D] holds η_D.
  std::vector<std::vector<double>> beta;
  /// The non-integer branch, computed alongside when the integer choice is ambiguous.
  std::shared_ptr<const OscillationProfile> alternative;

  /// Maps ε > 0 into (rg, g] by the period r.
  double fold(double eps) const;
  double eval(double eps) const;
  double eval_on(int q, double eps) const;
  double derivative_on(int q, double eps) const;
};

OscillationProfile p_closed_form(const PluriphaseData& p, const LatticeInfo& lat,
                                 std::optional<int> exact_integer_dim = std::nullopt);

struct SeriesValue {
  double value = 0.0;
  /// Contribution of the terms beyond ℓ_max (already included in value).
  double tail = 0.0;
  double tail_bound = 0.0;
};

SeriesValue p_series(const PluriphaseData& p, const LatticeInfo& lat, double eps, int l_max = 200);
/// Series from a sampled Γ-restricted curve: log-log interpolation between samples, power-law extrapolation below.
SeriesValue p_series(const VolumeCurve& curve, double gamma_volume, int d, double D, double g,
                     const LatticeInfo& lat, double eps, int l_max = 200);

struct OscillationSummary {
  double inf = 0.0;
  double sup = 0.0;
  double amplitude = 0.0;
  double error = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
};

OscillationSummary oscillation(const OscillationProfile& profile);
/// Grid extrema of sampled profile values with error bars.
OscillationSummary oscillation(const std::vector<double>& eps, const std::vector<double>& values,
                               const std::vector<double>& errors);

struct ConditionTerm {
  int k = 0;
  int q = 0;
  double value = 0.0;
  std::optional<Surd> exact_value;
  bool holds = false;
};

struct ConditionFormulation {
  bool pass = false;
  std::vector<ConditionTerm> terms;
  std::optional<double> C;
  std::optional<Surd> C_exact;
  std::string first_failure;
};

struct IntegerConditionReport {
  bool exact = false;
  int D = 0;
  /// Null conditions with L_m at a point of every I_q, and constancy of C.
  ConditionFormulation with_levels;
  /// Group sums over U_q with powers of the breakpoints, and C = Σ_m L_m(g)(κ_{m+1,D} - κ_{m,D}).
  ConditionFormulation with_groups;
  bool pass = false;
  std::optional<double> C;
  std::optional<Surd> C_exact;
};

/// Both algebraic characterizations for integer D < d; throws ConsistencyError
/// when they disagree.
IntegerConditionReport integer_conditions(const PluriphaseData& p, const LatticeInfo& lat, int D);

/// ln r / Σ r_i^D ln r_i
double content_factor(const LatticeInfo& lat, const std::vector<double>& ratios, double D);

struct AverageContent {
  double value = 0.0;
  /// Profile mean over one period times the content factor (lattice only).
  std::optional<double> profile_route;
  double route_gap = 0.0;
};

/// η^{-1} ∫ z dt in closed form from pluriphase data.
AverageContent average_content(const PluriphaseData& p, const std::vector<double>& ratios,
                               const std::optional<LatticeInfo>& lat = std::nullopt,
                               std::optional<int> exact_integer_dim = std::nullopt);
/// Same integral with λ_d(F_ε ∩ Γ) taken from a sampled curve.
double average_content(const VolumeCurve& curve, double gamma_volume, double g, int d, double D,
                       const std::vector<double>& ratios);

/// z(t) from the pluriphase data, with λ_d(O) = λ_d(Γ) / (1 - Σ r_i^d).
double renewal_forcing(const PluriphaseData& p, const std::vector<double>& ratios, double t);
/// ∫ z(t) dt in closed form.
double forcing_integral(const PluriphaseData& p);

struct TimeSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

TimeSeries sample_forcing(const std::function<double(double)>& z, double t0, double dt, std::size_t n);

/// Z(t) = z(t) + Σ p_i Z(t - y_i) with Z = 0 left of the grid start; each y_i
/// must be an integer multiple of the grid step.
TimeSeries renewal_solve(const TimeSeries& z, const std::vector<double>& weights, const std::vector<double>& delays);

/// (h/η) Σ_ℓ z(t - ℓh), summed until terms vanish on both sides.
double lattice_limit(const std::function<double(double)>& z, double h, double eta, double t,
                     double t_support_min);

/// Cesàro mean (1/T) ∫ Z over the grid (trapezoid rule).
double cesaro_mean(const TimeSeries& Z);

struct AsymptoticRow {
  double eps = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double deviation = 0.0;
};

/// Relative deviation of ε^{D-d} λ_d(F_ε) from factor·p(ε).
std::vector<AsymptoticRow> asymptotic_check(const Attractor& attractor, const OscillationProfile& profile,
                                            double factor, const std::vector<double>& eps,
                                            const VolumeMethod& method);

}  // namespace minklab
