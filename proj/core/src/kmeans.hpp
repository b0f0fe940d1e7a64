#pragma once

#include <cstdint>
#include <vector>

#include "adasel/subspace.hpp"

namespace adasel::detail {

struct KMeansResult {
  std::vector<int> labels;
  Matrix centers;
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by
/// inertia. Deterministic for a given row order and seed.
KMeansResult kmeans(const Eigen::Ref<const Matrix>& rows, int k, std::uint64_t seed,
                    int max_iterations, int restarts);

/// Row permutation that sorts rows lexicographically by value (ties by index).
std::vector<int> content_order(const Eigen::Ref<const Matrix>& rows);

}  // namespace adasel::detail
