#pragma once

#include <cstdint>
#include <vector>

#include "minklab/linalg.hpp"

namespace minklab {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2024ULL;

/// kDefaultSeed, or the value of MINKLAB_SEED when set.
std::uint64_t default_seed();

/// Halton sequence with random digit permutations and a random shift modulo
/// one, both drawn from the seed. Points lie in [0,1)^dim.
class QmcSequence {
 public:
  QmcSequence(int dim, std::uint64_t seed);

  int dim() const { return dim_; }
  void point(std::uint64_t index, double* out) const;
  Vec point_in(std::uint64_t index, const BoundingBox& box) const;

 private:
  int dim_;
  std::vector<int> bases_;
  std::vector<int> digits_;
  std::vector<std::vector<std::vector<int>>> perms_;  // [dim][digit][value]
  std::vector<double> shift_;
};

}  // namespace minklab
