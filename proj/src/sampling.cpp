#include "minklab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>

#include "minklab/errors.hpp"

namespace minklab {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MINKLAB_SEED")) {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw ValidationError(std::string("MINKLAB_SEED is not an unsigned integer: ") + env);
    }
  }
  return kDefaultSeed;
}

QmcSequence::QmcSequence(int dim, std::uint64_t seed) : dim_(dim) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (dim < 1 || dim > 8) throw ValidationError("QMC dimension must be between 1 and 8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int j = 0; j < dim; ++j) {
    const int b = kPrimes[j];
    bases_.push_back(b);
    const int nd = static_cast<int>(std::ceil(53.0 * std::log(2.0) / std::log(b)));
    digits_.push_back(nd);
    std::vector<std::vector<int>> per_digit;
    for (int k = 0; k < nd; ++k) {
      std::vector<int> p(static_cast<std::size_t>(b));
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      per_digit.push_back(std::move(p));
    }
    perms_.push_back(std::move(per_digit));
    shift_.push_back(unit(rng));
  }
}

void QmcSequence::point(std::uint64_t index, double* out) const {
  for (int j = 0; j < dim_; ++j) {
    const int b = bases_[static_cast<std::size_t>(j)];
    const auto& perm = perms_[static_cast<std::size_t>(j)];
    const double inv = 1.0 / b;
    double scale = inv;
    double v = 0.0;
    std::uint64_t n = index;
    for (int k = 0; k < digits_[static_cast<std::size_t>(j)]; ++k) {
      int digit = static_cast<int>(n % static_cast<std::uint64_t>(b));
      n /= static_cast<std::uint64_t>(b);
      v += perm[static_cast<std::size_t>(k)][static_cast<std::size_t>(digit)] * scale;
      scale *= inv;
    }
    v += shift_[static_cast<std::size_t>(j)];
    v -= std::floor(v);
    out[j] = v;
  }
}

Vec QmcSequence::point_in(std::uint64_t index, const BoundingBox& box) const {
  double u[8];
  point(index, u);
  Vec x(box.dim());
  for (int j = 0; j < box.dim(); ++j) x(j) = box.lo(j) + u[j] * (box.hi(j) - box.lo(j));
  return x;
}

}  // namespace minklab
