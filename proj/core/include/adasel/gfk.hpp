#pragma once

#include <optional>

#include "adasel/subspace.hpp"

namespace adasel {

/// A point θ(y) on the geodesic from span(x) (y = 0) to span(z) (y = 1).
struct FlowPoint {
  double y = 0.0;
  Matrix matrix;  // a×b, orthonormal columns
};

/// Geodesic between two subspaces in the aligned frame of a principal
/// decomposition:  θ(y) = x·U·diag(cos yθ) − x̃·R·diag(sin yθ).
class GeodesicFlow {
 public:
  GeodesicFlow(const PrincipalDecomposition& dec, const SubspaceBasis& x);

  /// Throws OutOfRange unless 0 <= y <= 1.
  FlowPoint at(double y) const;

  const Matrix& source_directions() const noexcept { return source_; }  // x·U
  const Matrix& normal_directions() const noexcept { return normal_; }  // x̃·R
  const Vector& angles() const noexcept { return angles_; }

 private:
  Matrix source_;
  Matrix normal_;
  Vector angles_;
};

FlowPoint geodesic_flow(const PrincipalDecomposition& dec, const SubspaceBasis& x, double y);

/// Diagonal entries of Λ₁, Λ₂, Λ₃ for one principal angle: the exact values of
/// ∫₀¹ cos², −cos·sin and sin² of (yθ) dy.
struct LambdaEntry {
  double l1;
  double l2;
  double l3;
};
LambdaEntry lambda_entry(double theta);

/// Symmetric PSD kernel W stored in factored form W = F·K·Fᵀ. For the
/// geodesic flow kernel F = [x·U, x̃·R] (a×2b) and K = [[Λ₁, Λ₂], [Λ₂, Λ₃]].
class GeodesicKernel {
 public:
  /// Wraps an explicit symmetric matrix (F = I, K = W). Throws
  /// DimensionMismatch for non-square input and InvalidArgument when W is
  /// not symmetric within 1e-10.
  static GeodesicKernel from_matrix(Matrix w);

  /// Dense a×a matrix W.
  Matrix matrix() const;

  int ambient_dim() const noexcept { return static_cast<int>(factor_.rows()); }
  const Matrix& factor() const noexcept { return factor_; }
  const Matrix& core() const noexcept { return core_; }

  /// Present only for kernels produced by gfk_kernel().
  const std::optional<PrincipalDecomposition>& source_decomposition() const noexcept {
    return decomposition_;
  }
  const Vector& lambda1() const noexcept { return lambda1_; }
  const Vector& lambda2() const noexcept { return lambda2_; }
  const Vector& lambda3() const noexcept { return lambda3_; }

 private:
  friend GeodesicKernel gfk_kernel(const PrincipalDecomposition&, const SubspaceBasis&);

  Matrix factor_;
  Matrix core_;
  std::optional<PrincipalDecomposition> decomposition_;
  Vector lambda1_;
  Vector lambda2_;
  Vector lambda3_;
};

/// Closed-form W = ∫₀¹ θ(y)·θ(y)ᵀ dy.
GeodesicKernel gfk_kernel(const PrincipalDecomposition& dec, const SubspaceBasis& x);

/// Composite trapezoidal estimate of ∫₀¹ θ(y)·θ(y)ᵀ dy from `steps` intervals
/// of geodesic_flow samples. Reference for gfk_kernel(); error is O(steps⁻²).
Matrix kernel_integral_oracle(const PrincipalDecomposition& dec, const SubspaceBasis& x,
                              int steps);

/// (t − r)ᵀ·W·(t − r), which equals tᵀWt + rᵀWr − 2tᵀWr. Rounding negatives
/// down to −1e-10 (relative) are clamped to 0; anything more negative means W
/// is not PSD and throws NotPositiveSemidefinite.
double kernel_distance(const Eigen::Ref<const Vector>& t, const Eigen::Ref<const Vector>& r,
                       const GeodesicKernel& w);

/// e^(−d). Throws InvalidArgument for negative or NaN d.
double similarity(double distance);

}  // namespace adasel
