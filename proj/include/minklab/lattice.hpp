#pragma once

#include <optional>
#include <vector>

#include "minklab/exact.hpp"

namespace minklab {

/// Root D of sum r_i^D = 1: bisection to 1e-13, then Newton polishing.
double similarity_dimension(const std::vector<double>& ratios);

/// Integer n with sum q_i^n == 1 exactly, if one exists.
std::optional<int> exact_integer_dimension(const std::vector<Rational>& ratios);

struct LatticeInfo {
  bool is_lattice = false;
  double base = 0.0;
  std::optional<Rational> exact_base;
  std::vector<int> exponents;
  double eta = 0.0;
  double h = 0.0;
  bool declared = false;
};

/// Numeric lattice detection: ln r_i / ln r_1 must be rational with
/// denominator <= max_denominator within tol. The base is minimal.
LatticeInfo classify_lattice(const std::vector<double>& ratios, double D, double tol = 1e-9,
                             int max_denominator = 64);

/// Verifies a declared base and exponents. Exact comparison is used when the
/// base and all ratios are rational; otherwise agreement to 1e-12 relative.
/// Throws ValidationError on mismatch or non-minimal exponents.
LatticeInfo verify_lattice(const std::vector<double>& ratios, double D, double base,
                           const std::vector<int>& exponents,
                           const std::optional<Rational>& exact_base = std::nullopt,
                           const std::optional<std::vector<Rational>>& exact_ratios = std::nullopt);

/// Sets exact_base when some map has exponent 1 and base^k_i equals every
/// exact ratio. Returns whether an exact base was attached.
bool attach_exact_base(LatticeInfo& info, const std::vector<Rational>& exact_ratios);

/// eta = -sum r_i^D ln r_i
double renewal_mean(const std::vector<double>& ratios, double D);

}  // namespace minklab
