#include "adasel/gfk.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "adasel/error.hpp"

namespace adasel {
namespace {

// Below this angle λ₁ and λ₃ switch to their Taylor series; 1/2 − sin(2θ)/(4θ)
// cancels catastrophically for small θ. The truncation error of the series
// at the switch point is below 2e-17.
constexpr double kSeriesThreshold = 1e-2;

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kNegativeDistanceTolerance = 1e-10;

}  // namespace

GeodesicFlow::GeodesicFlow(const PrincipalDecomposition& dec, const SubspaceBasis& x)
    : angles_(dec.angles) {
  const auto b = dec.angles.size();
  if (x.dim() != b || dec.left_rotation.rows() != b ||
      dec.complement_rotation.rows() != x.ambient_dim() - b) {
    fail(ErrorCode::DimensionMismatch, "decomposition does not belong to this subspace");
  }
  source_ = x.basis() * dec.left_rotation;
  normal_ = x.complement() * dec.complement_rotation;
}

FlowPoint GeodesicFlow::at(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) {
    fail(ErrorCode::OutOfRange, "geodesic parameter must lie in [0, 1], got " + std::to_string(y));
  }
  FlowPoint point{y, Matrix(source_.rows(), source_.cols())};
  for (Eigen::Index k = 0; k < angles_.size(); ++k) {
    const double phase = y * angles_(k);
    point.matrix.col(k) = std::cos(phase) * source_.col(k) - std::sin(phase) * normal_.col(k);
  }
  return point;
}

FlowPoint geodesic_flow(const PrincipalDecomposition& dec, const SubspaceBasis& x, double y) {
  return GeodesicFlow(dec, x).at(y);
}

LambdaEntry lambda_entry(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12)) {
    fail(ErrorCode::OutOfRange, "principal angle must lie in [0, pi/2], got " + std::to_string(theta));
  }
  if (theta < kSeriesThreshold) {
    const double t2 = theta * theta;
    // sin(2θ)/(4θ) = 1/2 − θ²/3 + θ⁴/15 − 2θ⁶/315 + O(θ⁸)
    const double tail = t2 / 3.0 - t2 * t2 / 15.0 + 2.0 * t2 * t2 * t2 / 315.0;
    // −sin²θ/(2θ) = −θ/2 + θ³/6 − θ⁵/45 + O(θ⁷)
    const double l2 = -theta / 2.0 + theta * t2 / 6.0 - theta * t2 * t2 / 45.0;
    return {1.0 - tail, l2, tail};
  }
  const double half_sinc = std::sin(2.0 * theta) / (4.0 * theta);
  const double s = std::sin(theta);
  // (cos 2θ − 1)/(4θ) rewritten as −sin²θ/(2θ) to avoid cancellation.
  return {0.5 + half_sinc, -s * s / (2.0 * theta), 0.5 - half_sinc};
}

GeodesicKernel GeodesicKernel::from_matrix(Matrix w) {
  if (w.rows() != w.cols()) fail(ErrorCode::DimensionMismatch, "kernel matrix must be square");
  require_finite(w, "kernel matrix");
  if (w.size() > 0 && (w - w.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    fail(ErrorCode::InvalidArgument, "kernel matrix is not symmetric");
  }
  GeodesicKernel kernel;
  kernel.factor_ = Matrix::Identity(w.rows(), w.cols());
  kernel.core_ = std::move(w);
  return kernel;
}

Matrix GeodesicKernel::matrix() const {
  Matrix w = factor_ * core_ * factor_.transpose();
  return 0.5 * (w + w.transpose());
}

GeodesicKernel gfk_kernel(const PrincipalDecomposition& dec, const SubspaceBasis& x) {
  const GeodesicFlow flow(dec, x);
  const auto a = x.ambient_dim();
  const auto b = x.dim();

  GeodesicKernel kernel;
  kernel.lambda1_.resize(b);
  kernel.lambda2_.resize(b);
  kernel.lambda3_.resize(b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const LambdaEntry e = lambda_entry(dec.angles(k));
    kernel.lambda1_(k) = e.l1;
    kernel.lambda2_(k) = e.l2;
    kernel.lambda3_(k) = e.l3;
  }

  kernel.factor_.resize(a, 2 * b);
  kernel.factor_ << flow.source_directions(), flow.normal_directions();
  kernel.core_ = Matrix::Zero(2 * b, 2 * b);
  kernel.core_.topLeftCorner(b, b).diagonal() = kernel.lambda1_;
  kernel.core_.topRightCorner(b, b).diagonal() = kernel.lambda2_;
  kernel.core_.bottomLeftCorner(b, b).diagonal() = kernel.lambda2_;
  kernel.core_.bottomRightCorner(b, b).diagonal() = kernel.lambda3_;
  kernel.decomposition_ = dec;
  return kernel;
}

Matrix kernel_integral_oracle(const PrincipalDecomposition& dec, const SubspaceBasis& x,
                              int steps) {
  if (steps < 10) fail(ErrorCode::InvalidArgument, "oracle needs at least 10 steps");
  const GeodesicFlow flow(dec, x);
  const auto a = x.ambient_dim();
  const double h = 1.0 / steps;

  Matrix acc = Matrix::Zero(a, a);
  for (int i = 0; i <= steps; ++i) {
    const double weight = (i == 0 || i == steps) ? 0.5 * h : h;
    const FlowPoint p = flow.at(static_cast<double>(i) / steps);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(p.matrix, weight);
  }
  return acc.selfadjointView<Eigen::Lower>();
}

double kernel_distance(const Eigen::Ref<const Vector>& t, const Eigen::Ref<const Vector>& r,
                       const GeodesicKernel& w) {
  if (t.size() != r.size() || t.size() != w.ambient_dim()) {
    fail(ErrorCode::DimensionMismatch,
         "features of length " + std::to_string(t.size()) + " and " + std::to_string(r.size()) +
             " against a kernel of dimension " + std::to_string(w.ambient_dim()));
  }
  const Vector projected = w.factor().transpose() * (t - r);
  const double d = projected.dot(w.core() * projected);
  if (d >= 0.0) return d;
  const double scale =
      std::max(1.0, projected.squaredNorm() * w.core().cwiseAbs().maxCoeff());
  if (d >= -kNegativeDistanceTolerance * scale) return 0.0;
  fail(ErrorCode::NotPositiveSemidefinite,
       "kernel distance " + std::to_string(d) + " is negative beyond rounding");
}

double similarity(double distance) {
  if (!(distance >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "distance must be non-negative, got " + std::to_string(distance));
  }
  return std::exp(-distance);
}

}  // namespace adasel
