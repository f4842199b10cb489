#pragma once

#include <optional>
#include <vector>

#include "minklab/exact.hpp"
#include "minklab/linalg.hpp"

namespace minklab {

/// Contracting similarity x -> r Q x + b. The identity is representable
/// through Similarity::identity and is the only instance allowed ratio 1.
class Similarity {
 public:
  Similarity(double ratio, Mat orthogonal, Vec translation);

  static Similarity identity(int dim);
  /// Planar map with rotation by angle_deg (counterclockwise).
  static Similarity planar(double ratio, double angle_deg, double tx, double ty);
  /// Pure scaling plus translation in any dimension.
  static Similarity scaling(double ratio, const Vec& translation);

  int dim() const { return static_cast<int>(b_.size()); }
  double ratio() const { return r_; }
  const Mat& orthogonal() const { return q_; }
  const Vec& translation() const { return b_; }
  bool is_identity() const { return identity_; }
  /// True when the orthogonal part is exactly the identity matrix.
  bool is_pure_scaling() const { return pure_scaling_; }

  /// Exact ratio when declared as a rational.
  const std::optional<Rational>& exact_ratio() const { return exact_ratio_; }
  void set_exact_ratio(const Rational& q);

  Vec apply(const Vec& x) const;
  Vec apply_inverse(const Vec& y) const;
  /// Composition this ∘ inner.
  Similarity compose(const Similarity& inner) const;
  /// The unique fixed point (requires ratio < 1).
  Vec fixed_point() const;

 private:
  Similarity() = default;

  double r_ = 1.0;
  Mat q_;
  Vec b_;
  bool identity_ = false;
  bool pure_scaling_ = false;
  std::optional<Rational> exact_ratio_;
};

/// Finite word over the alphabet {0, ..., N-1}. The C++ and Python APIs
/// index maps from zero; scene files and CLI output use the same indexing.
using Word = std::vector<int>;

class IteratedFunctionSystem {
 public:
  IteratedFunctionSystem(std::vector<Similarity> maps);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(maps_.size()); }
  const Similarity& map(int i) const { return maps_.at(static_cast<std::size_t>(i)); }
  const std::vector<Similarity>& maps() const { return maps_; }
  std::vector<double> ratios() const;
  double max_ratio() const;
  /// Exact ratios when every map declares one.
  std::optional<std::vector<Rational>> exact_ratios() const;

  Similarity compose_word(const Word& w) const;
  double word_ratio(const Word& w) const;

 private:
  int dim_ = 0;
  std::vector<Similarity> maps_;
};

inline Vec apply(const Similarity& s, const Vec& x) { return s.apply(x); }

}  // namespace minklab
