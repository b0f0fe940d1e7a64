#include "adasel/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "adasel/error.hpp"

namespace adasel {
namespace {

constexpr double kOrthonormalTolerance = 1e-8;

// Sines at or below this are treated as exact zeros: the angle is set to 0
// and the matching column of R becomes a completion vector.
constexpr double kZeroSine = 1e-12;

Eigen::Index argmax_abs(const Eigen::Ref<const Vector>& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return idx;
}

// Gram-Schmidt with one re-orthogonalization pass against `accepted`.
bool orthogonalize_into(Vector v, Matrix& accepted, Eigen::Index filled, Eigen::Index column,
                        double min_norm) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < filled; ++j) v -= accepted.col(j).dot(v) * accepted.col(j);
  }
  const double norm = v.norm();
  if (norm <= min_norm) return false;
  accepted.col(column) = v / norm;
  return true;
}

}  // namespace

void require_finite(const Eigen::Ref<const Matrix>& values, const char* what) {
  if (!values.allFinite()) fail(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
}

double orthonormality_error(const Eigen::Ref<const Matrix>& q) {
  if (q.cols() == 0) return 0.0;
  const Matrix gram = q.transpose() * q;
  return (gram - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

void canonicalize_column_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (columns.rows() == 0) break;
    if (columns(argmax_abs(columns.col(j)), j) < 0.0) columns.col(j) *= -1.0;
  }
}

SubspaceBasis SubspaceBasis::from_orthonormal(Matrix basis) {
  Matrix complement = orthogonal_complement(basis);
  return SubspaceBasis(std::move(basis), std::move(complement));
}

SubspaceBasis SubspaceBasis::from_parts(Matrix basis, Matrix complement) {
  const auto a = basis.rows();
  const auto b = basis.cols();
  if (b < 1 || b >= a) {
    fail(ErrorCode::InvalidArgument, "subspace dimension must satisfy 1 <= b < a, got b=" +
                                         std::to_string(b) + ", a=" + std::to_string(a));
  }
  if (complement.rows() != a || complement.cols() != a - b) {
    fail(ErrorCode::DimensionMismatch, "complement must be " + std::to_string(a) + "x" +
                                           std::to_string(a - b));
  }
  require_finite(basis, "basis");
  require_finite(complement, "complement");
  if (orthonormality_error(basis) > kOrthonormalTolerance) {
    fail(ErrorCode::NotOrthonormal, "basis columns are not orthonormal");
  }
  if (orthonormality_error(complement) > kOrthonormalTolerance) {
    fail(ErrorCode::NotOrthonormal, "complement columns are not orthonormal");
  }
  if ((basis.transpose() * complement).cwiseAbs().maxCoeff() > kOrthonormalTolerance) {
    fail(ErrorCode::NotOrthonormal, "complement is not orthogonal to the basis");
  }
  return SubspaceBasis(std::move(basis), std::move(complement));
}

SubspaceBasis SubspaceBasis::leading(int k) const {
  if (k < 1 || k > dim()) {
    fail(ErrorCode::OutOfRange, "leading(" + std::to_string(k) + ") on a " +
                                    std::to_string(dim()) + "-dimensional subspace");
  }
  if (k == dim()) return *this;
  Matrix complement(ambient_dim(), ambient_dim() - k);
  complement << basis_.rightCols(dim() - k), complement_;
  return SubspaceBasis(basis_.leftCols(k), std::move(complement));
}

Matrix orthogonal_complement(const Eigen::Ref<const Matrix>& basis) {
  const auto a = basis.rows();
  const auto b = basis.cols();
  if (b < 1 || b >= a) {
    fail(ErrorCode::InvalidArgument, "orthogonal_complement needs 1 <= b < a, got b=" +
                                         std::to_string(b) + ", a=" + std::to_string(a));
  }
  require_finite(basis, "basis");
  if (orthonormality_error(basis) > kOrthonormalTolerance) {
    fail(ErrorCode::NotOrthonormal, "input columns are not orthonormal within 1e-8");
  }
  const Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix tail = Matrix::Zero(a, a - b);
  tail.bottomRows(a - b).setIdentity();
  Matrix complement = qr.householderQ() * tail;
  canonicalize_column_signs(complement);
  return complement;
}

SubspaceBasis pca_basis(const Eigen::Ref<const Matrix>& samples, int b) {
  const auto n = samples.rows();
  const auto a = samples.cols();
  if (n < 2) fail(ErrorCode::InvalidArgument, "pca_basis needs at least 2 samples");
  if (a < 2) fail(ErrorCode::InvalidArgument, "feature dimension must be at least 2");
  if (b < 1 || b >= a) {
    fail(ErrorCode::InvalidArgument, "subspace dimension must satisfy 1 <= b < a, got b=" +
                                         std::to_string(b) + ", a=" + std::to_string(a));
  }
  require_finite(samples, "samples");

  const Vector mean = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - mean.transpose();
  const Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();

  // Rank threshold scaled by the raw data so that frames which are identical
  // up to rounding of the mean count as rank zero.
  const double scale = std::max(sv.size() > 0 ? sv(0) : 0.0, samples.norm());
  const double tol =
      static_cast<double>(std::max(n, a)) * std::numeric_limits<double>::epsilon() * scale;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  if (rank < b) throw RankDeficientError(rank, b);

  Matrix basis = svd.matrixV().leftCols(b);
  canonicalize_column_signs(basis);
  return SubspaceBasis::from_orthonormal(std::move(basis));
}

PrincipalDecomposition principal_angles(const SubspaceBasis& x, const SubspaceBasis& z) {
  if (x.empty() || z.empty()) fail(ErrorCode::InvalidArgument, "empty subspace");
  if (x.ambient_dim() != z.ambient_dim() || x.dim() != z.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "subspaces are " + std::to_string(x.ambient_dim()) + "x" + std::to_string(x.dim()) +
             " and " + std::to_string(z.ambient_dim()) + "x" + std::to_string(z.dim()));
  }
  const int b = x.dim();
  const int c = x.ambient_dim() - b;

  const Matrix cross = x.basis().transpose() * z.basis();
  const Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  for (int k = 0; k < b; ++k) {
    if (u(argmax_abs(u.col(k)), k) < 0.0) {
      u.col(k) *= -1.0;
      v.col(k) *= -1.0;
    }
  }

  // Component of z·V outside span(x), expressed in complement coordinates.
  // Its column norms are the sines of the principal angles.
  const Matrix normal = x.complement().transpose() * (z.basis() * v);

  Vector cosines(b), sines(b), angles(b);
  for (int k = 0; k < b; ++k) {
    cosines(k) = std::clamp(svd.singularValues()(k), 0.0, 1.0);
    sines(k) = std::clamp(normal.col(k).norm(), 0.0, 1.0);
    if (sines(k) <= kZeroSine) {
      sines(k) = 0.0;
      cosines(k) = 1.0;
    }
    angles(k) = std::atan2(sines(k), cosines(k));
  }

  // Sort by angle; exact ties (the zero-angle block) fall back to the row of
  // each U column's dominant entry so that x = z yields U = V = I.
  std::vector<int> order(b);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (angles(i) != angles(j)) return angles(i) < angles(j);
    return argmax_abs(u.col(i)) < argmax_abs(u.col(j));
  });

  PrincipalDecomposition dec;
  dec.angles.resize(b);
  dec.cosines.resize(b);
  dec.sines.resize(b);
  dec.left_rotation.resize(b, b);
  dec.right_rotation.resize(b, b);
  Matrix scaled_normal(c, b);
  for (int k = 0; k < b; ++k) {
    const int src = order[k];
    dec.angles(k) = angles(src);
    dec.cosines(k) = cosines(src);
    dec.sines(k) = sines(src);
    dec.left_rotation.col(k) = u.col(src);
    dec.right_rotation.col(k) = v.col(src);
    scaled_normal.col(k) = normal.col(src);
  }

  // R: normalized −x̃ᵀzV columns, re-orthogonalized largest sine first (those
  // directions are the most accurate), then completed for zero angles.
  Matrix rotation = Matrix::Zero(c, b);
  Matrix accepted(c, b);
  Eigen::Index filled = 0;
  std::vector<int> by_sine(b);
  std::iota(by_sine.begin(), by_sine.end(), 0);
  std::stable_sort(by_sine.begin(), by_sine.end(),
                   [&](int i, int j) { return dec.sines(i) > dec.sines(j); });
  std::vector<int> degenerate;
  for (int k : by_sine) {
    if (dec.sines(k) == 0.0 || filled >= c) {
      degenerate.push_back(k);
      continue;
    }
    const Vector column = -scaled_normal.col(k) / dec.sines(k);
    if (orthogonalize_into(column, accepted, filled, filled, 0.5)) {
      rotation.col(k) = accepted.col(filled);
      ++filled;
    } else {
      degenerate.push_back(k);
    }
  }
  std::sort(degenerate.begin(), degenerate.end());
  Eigen::Index candidate = 0;
  for (int k : degenerate) {
    bool placed = false;
    while (!placed && filled < c && candidate < c) {
      placed = orthogonalize_into(Vector::Unit(c, candidate++), accepted, filled, filled, 0.5);
    }
    if (!placed) break;  // a − b < b: no room left, remaining columns stay zero
    rotation.col(k) = accepted.col(filled);
    ++filled;
  }
  dec.complement_rotation = std::move(rotation);
  return dec;
}

Vector subspace_angles(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "subspace_angles needs equally shaped bases");
  }
  const Matrix cross = a.transpose() * b;
  const Vector cosines = Eigen::JacobiSVD<Matrix>(cross).singularValues();
  const Matrix residual = b - a * cross;
  const Vector sines_desc = Eigen::JacobiSVD<Matrix>(residual).singularValues();
  const auto k = cosines.size();
  Vector angles(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines_desc(k - 1 - i), 0.0, 1.0);
    angles(i) = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  return angles;
}

}  // namespace adasel
