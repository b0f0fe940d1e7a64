#include "kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace adasel::detail {
namespace {

using Engine = boost::random::mt19937_64;

Matrix seed_centers(const Eigen::Ref<const Matrix>& rows, int k, Engine& engine) {
  const auto n = rows.rows();
  Matrix centers(k, rows.cols());
  boost::random::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = rows.row(pick(engine));

  Vector nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest(i) = (rows.row(i) - centers.row(0)).squaredNorm();

  boost::random::uniform_01<double> unit;
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = unit(engine) * total;
      double running = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target && nearest(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(engine);
    }
    centers.row(c) = rows.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), (rows.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

KMeansResult lloyd(const Eigen::Ref<const Matrix>& rows, Matrix centers, int max_iterations) {
  const auto n = rows.rows();
  const auto k = centers.rows();
  KMeansResult result;
  result.labels.assign(n, -1);
  Vector distance(n);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      distance(i) = best_d;
      if (result.labels[i] != best) {
        result.labels[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(k, rows.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(result.labels[i]) += rows.row(i);
      ++counts[result.labels[i]];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: move it onto the point worst served by its center.
      Eigen::Index far = 0;
      distance.maxCoeff(&far);
      centers.row(c) = rows.row(far);
      distance(far) = 0.0;
      changed = true;
    }
  }

  result.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.inertia += (rows.row(i) - centers.row(result.labels[i])).squaredNorm();
  }
  result.centers = std::move(centers);
  return result;
}

}  // namespace

KMeansResult kmeans(const Eigen::Ref<const Matrix>& rows, int k, std::uint64_t seed,
                    int max_iterations, int restarts) {
  Engine engine(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, restarts); ++run) {
    KMeansResult candidate = lloyd(rows, seed_centers(rows, k, engine), max_iterations);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

std::vector<int> content_order(const Eigen::Ref<const Matrix>& rows) {
  std::vector<int> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (rows(i, c) != rows(j, c)) return rows(i, c) < rows(j, c);
    }
    return false;
  });
  return order;
}

}  // namespace adasel::detail
