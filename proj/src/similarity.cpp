#include "minklab/similarity.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "minklab/errors.hpp"

namespace minklab {

Similarity::Similarity(double ratio, Mat orthogonal, Vec translation)
    : r_(ratio), q_(std::move(orthogonal)), b_(std::move(translation)) {
  const auto d = b_.size();
  if (d < 1 || d > kMaxDim)
    throw ValidationError("similarity dimension must be between 1 and " + std::to_string(kMaxDim));
  if (q_.rows() != d || q_.cols() != d)
    throw ValidationError("orthogonal part must be a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ValidationError("similarity ratio must lie in (0,1), got " + std::to_string(ratio));
  Mat gram = q_.transpose() * q_;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw ValidationError("orthogonal part is not orthogonal (Q^T Q deviates from I by more than 1e-12)");
  pure_scaling_ = q_.isIdentity(0.0);
}

Similarity Similarity::identity(int dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("identity dimension out of range");
  Similarity s;
  s.r_ = 1.0;
  s.q_ = Mat::Identity(dim, dim);
  s.b_ = Vec::Zero(dim);
  s.identity_ = true;
  s.pure_scaling_ = true;
  s.exact_ratio_ = Rational(1);
  return s;
}

Similarity Similarity::planar(double ratio, double angle_deg, double tx, double ty) {
  Mat q(2, 2);
  const double t = angle_deg * std::numbers::pi / 180.0;
  double c = std::cos(t), s = std::sin(t);
  // Snap multiples of 90 degrees so axis-aligned maps stay exact.
  double quarter = angle_deg / 90.0;
  if (std::abs(quarter - std::round(quarter)) < 1e-12) {
    int k = ((static_cast<int>(std::round(quarter)) % 4) + 4) % 4;
    const int cs[4] = {1, 0, -1, 0};
    const int sn[4] = {0, 1, 0, -1};
    c = cs[k];
    s = sn[k];
  }
  q << c, -s, s, c;
  Vec b(2);
  b << tx, ty;
  return Similarity(ratio, q, b);
}

Similarity Similarity::scaling(double ratio, const Vec& translation) {
  const auto d = translation.size();
  return Similarity(ratio, Mat::Identity(d, d), translation);
}

void Similarity::set_exact_ratio(const Rational& q) {
  if (std::abs(to_double(q) - r_) > 1e-15 * std::max(1.0, r_))
    throw ValidationError("exact ratio does not match the floating-point ratio");
  exact_ratio_ = q;
}

Vec Similarity::apply(const Vec& x) const {
  if (x.size() != b_.size())
    throw ValidationError("point dimension " + std::to_string(x.size()) + " does not match map dimension " +
                          std::to_string(b_.size()));
  if (pure_scaling_) return r_ * x + b_;
  return r_ * (q_ * x) + b_;
}

Vec Similarity::apply_inverse(const Vec& y) const {
  if (y.size() != b_.size()) throw ValidationError("point dimension does not match map dimension");
  if (pure_scaling_) return (y - b_) / r_;
  return q_.transpose() * (y - b_) / r_;
}

Similarity Similarity::compose(const Similarity& inner) const {
  if (inner.dim() != dim()) throw ValidationError("cannot compose maps of different dimensions");
  if (identity_) return inner;
  if (inner.identity_) return *this;
  Similarity s;
  s.r_ = r_ * inner.r_;
  s.pure_scaling_ = pure_scaling_ && inner.pure_scaling_;
  if (s.pure_scaling_) {
    s.q_ = Mat::Identity(dim(), dim());
    s.b_ = r_ * inner.b_ + b_;
  } else {
    s.q_ = q_ * inner.q_;
    s.b_ = r_ * (q_ * inner.b_) + b_;
  }
  if (exact_ratio_ && inner.exact_ratio_) s.exact_ratio_ = *exact_ratio_ * *inner.exact_ratio_;
  return s;
}

Vec Similarity::fixed_point() const {
  if (identity_) throw ValidationError("the identity has no unique fixed point");
  const auto d = b_.size();
  Mat a = Mat::Identity(d, d) - r_ * q_;
  return a.partialPivLu().solve(b_);
}

IteratedFunctionSystem::IteratedFunctionSystem(std::vector<Similarity> maps) : maps_(std::move(maps)) {
  if (maps_.size() < 2) throw ValidationError("an iterated function system needs at least 2 maps");
  dim_ = maps_.front().dim();
  for (const auto& m : maps_) {
    if (m.is_identity()) throw ValidationError("iterated function system maps must be contractions");
    if (m.dim() != dim_) throw ValidationError("all maps must share one dimension");
  }
}

std::vector<double> IteratedFunctionSystem::ratios() const {
  std::vector<double> r;
  r.reserve(maps_.size());
  for (const auto& m : maps_) r.push_back(m.ratio());
  return r;
}

double IteratedFunctionSystem::max_ratio() const {
  double r = 0.0;
  for (const auto& m : maps_) r = std::max(r, m.ratio());
  return r;
}

std::optional<std::vector<Rational>> IteratedFunctionSystem::exact_ratios() const {
  std::vector<Rational> out;
  for (const auto& m : maps_) {
    if (!m.exact_ratio()) return std::nullopt;
    out.push_back(*m.exact_ratio());
  }
  return out;
}

Similarity IteratedFunctionSystem::compose_word(const Word& w) const {
  Similarity s = Similarity::identity(dim_);
  for (int letter : w) {
    if (letter < 0 || letter >= size())
      throw ValidationError("word letter " + std::to_string(letter) + " outside alphabet {0,...," +
                            std::to_string(size() - 1) + "}");
    s = s.compose(maps_[static_cast<std::size_t>(letter)]);
  }
  return s;
}

double IteratedFunctionSystem::word_ratio(const Word& w) const {
  return compose_word(w).ratio();
}

}  // namespace minklab
