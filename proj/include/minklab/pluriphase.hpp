#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/exact.hpp"

namespace minklab {

struct VolumeCurve;

/// Exact counterpart of the piecewise-polynomial data, in one quadratic field.
struct ExactPluriphase {
  std::vector<Surd> breakpoints;
  std::vector<std::vector<Surd>> coeffs;
  Surd gamma_volume;
};

/// λ_d(F_ε ∩ Γ) = Σ_k κ_{m,k} ε^{d-k} on (a_{m-1}, a_m], and λ_d(Γ) beyond g.
/// Breakpoints hold a_1 < ... < a_M = g (a_0 = 0 is implicit); pieces and
/// coefficient rows are indexed m = 1..M in the accessors.
struct PluriphaseData {
  int ambient_dim = 0;
  double similarity_dim = 0.0;
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> coeffs;
  double gamma_volume = 0.0;
  std::optional<ExactPluriphase> exact;
  /// "declared" for user data, "empirical" for fitted data.
  std::string provenance = "declared";

  static PluriphaseData from_exact(int d, double D, ExactPluriphase data);

  int pieces() const { return static_cast<int>(breakpoints.size()); }
  double g() const { return breakpoints.back(); }
  bool is_exact() const { return exact.has_value(); }
  /// a_m for m = 0..M.
  double a(int m) const;
  Surd a_exact(int m) const;
  /// κ_{m,k} for m = 1..M+1 with κ_{M+1,k} = 0 (k < d) and κ_{M+1,d} = λ_d(Γ).
  double kappa(int m, int k) const;
  Surd kappa_exact(int m, int k) const;

  double eval(double eps) const;
  Surd eval_exact(const Surd& eps) const;
  /// Piece index m with ε in (a_{m-1}, a_m], or M+1 beyond g.
  int piece_of(double eps) const;
};

double eval(const PluriphaseData& p, double eps);

/// Human-readable invariant violations (empty when valid).
std::vector<std::string> validate(const PluriphaseData& p, int grid_points = 10000);

bool is_monophase(const PluriphaseData& p);

struct FitOptions {
  int max_pieces = 6;
  double threshold = 5.0;
  int window = 5;
  int refine_width = 8;
  double merge_tol = 1e-6;
};

struct FitResult {
  bool ok = false;
  std::optional<PluriphaseData> data;
  std::string message;
  double rms = 0.0;
  std::vector<int> split_indices;
};

/// Piecewise-polynomial fit of a Γ-restricted volume curve. Points with
/// ε <= g are segmented; points beyond g determine λ_d(Γ).
FitResult fit(const VolumeCurve& curve, int d, double D, double g, const FitOptions& options = {});
FitResult fit(const std::vector<double>& eps, const std::vector<double>& values, const std::vector<double>& sigma,
              int d, double D, double g, const FitOptions& options = {});

}  // namespace minklab
