#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "adasel/dataio.hpp"
#include "adasel/gfk.hpp"
#include "adasel/profile.hpp"
#include "adasel/subspace.hpp"

namespace adasel::testing {

inline std::filesystem::path source_dir() { return ADASEL_SOURCE_DIR; }

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

inline Matrix random_orthonormal(std::mt19937_64& rng, int a, int b) {
  return gaussian(rng, a, b).householderQr().householderQ() * Matrix::Identity(a, b);
}

inline SubspaceBasis random_subspace(std::mt19937_64& rng, int a, int b) {
  return SubspaceBasis::from_orthonormal(random_orthonormal(rng, a, b));
}

inline Matrix rotation_2d(double alpha) {
  Matrix r(2, 2);
  r << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
  return r;
}

inline double relative_frobenius(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / want.norm();
}

/// Unique temporary directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adasel-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Combos and platforms shaped like the two-PC HOG/ACF comparison.
inline Catalog two_platform_catalog() { return read_catalog(source_dir() / "data" / "two_platform_catalog.json"); }

/// Missed-detection table for the two-platform catalog. Errors fall with
/// achievable fps and resolution. On the slow platform the low-resolution ACF
/// combo wins most scenarios and high-resolution HOG wins the rest; on the
/// fast platform high-resolution ACF wins every scenario.
inline std::vector<PerformanceRecord> two_platform_performance(const std::vector<std::string>& scenarios,
                                                         const Catalog& catalog,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  std::vector<PerformanceRecord> out;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    // Every fourth scenario is crowded with small pedestrians, where
    // resolution matters more than frame rate.
    const bool crowded = i % 4 == 3;
    for (const auto& p : catalog.platforms) {
      for (const auto& c : catalog.combos) {
        // Detection quality saturates at 10 fps.
        const double fps = std::min(p.achievable_fps(c.id), 10.0);
        const bool high_res = c.resolution.width >= 640;
        const bool acf = c.algorithm == "ACF";
        double error = 40.0 - 2.0 * fps;
        error -= high_res ? (crowded ? 12.0 : 6.0) : 0.0;
        error -= acf ? 5.0 : 0.0;
        error += jitter(rng);
        out.push_back({scenarios[i], c.id, p.id, std::max(0.0, error), {}});
      }
    }
  }
  return out;
}

}  // namespace adasel::testing
