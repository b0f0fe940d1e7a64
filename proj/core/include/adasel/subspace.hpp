#pragma once

#include <Eigen/Dense>

namespace adasel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A frame or window descriptor in R^a. Collections of features are stored
/// as the rows of a Matrix.
using FeatureVector = Vector;

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& values, const char* what);

/// Largest absolute entry of QᵀQ − I.
double orthonormality_error(const Eigen::Ref<const Matrix>& q);

/// Flips columns so that the largest-magnitude entry of each is positive
/// (first such entry on ties).
void canonicalize_column_signs(Matrix& columns);

/// Orthonormal basis of a b-dimensional subspace of R^a together with an
/// orthonormal basis of its orthogonal complement.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  /// Builds the complement with orthogonal_complement(). Throws NotOrthonormal.
  static SubspaceBasis from_orthonormal(Matrix basis);

  /// Adopts a stored basis/complement pair after checking every invariant
  /// (orthonormality, mutual orthogonality, 1 <= b < a) to 1e-8.
  static SubspaceBasis from_parts(Matrix basis, Matrix complement);

  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& complement() const noexcept { return complement_; }
  int ambient_dim() const noexcept { return static_cast<int>(basis_.rows()); }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  bool empty() const noexcept { return basis_.size() == 0; }

  /// The span of the first k basis columns. The dropped columns move to the
  /// front of the complement.
  SubspaceBasis leading(int k) const;

 private:
  SubspaceBasis(Matrix basis, Matrix complement)
      : basis_(std::move(basis)), complement_(std::move(complement)) {}

  Matrix basis_;
  Matrix complement_;
};

/// Principal angles between span(x) and span(z) and the rotations that
/// align them:
///   xᵀz = U·diag(cos θ)·Vᵀ,   x̃·R·diag(sin θ) = −(I − x·xᵀ)·z·V.
/// Angles are sorted non-decreasing. Columns of R whose angle is zero are an
/// arbitrary orthonormal completion (zero columns if a − b < b leaves no room).
struct PrincipalDecomposition {
  Vector angles;
  Vector cosines;
  Vector sines;
  Matrix left_rotation;        // U, b×b
  Matrix right_rotation;       // V, b×b
  Matrix complement_rotation;  // R, (a−b)×b
};

/// Top-b principal directions of the mean-centred rows of `samples`, via SVD
/// of the centred data matrix. Throws DimensionMismatch / InvalidArgument on
/// bad shapes and RankDeficientError when the centred rank is below b.
SubspaceBasis pca_basis(const Eigen::Ref<const Matrix>& samples, int b);

/// Orthonormal basis of the orthogonal complement of span(basis), taken from
/// a full Householder QR of `basis` and sign-canonicalized.
Matrix orthogonal_complement(const Eigen::Ref<const Matrix>& basis);

PrincipalDecomposition principal_angles(const SubspaceBasis& x, const SubspaceBasis& z);

/// Principal angles between the column spans of two orthonormal matrices,
/// accurate for both small and large angles. Does not need complements.
Vector subspace_angles(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

}  // namespace adasel
