#include "avgnet/convex_sets.hpp"

#include "avgnet/format.hpp"

#include <algorithm>
#include <cmath>

namespace avgnet {

std::string_view ToString(SetKind k) {
  switch (k) {
    case SetKind::kBox:
      return "box";
    case SetKind::kBall:
      return "ball";
    case SetKind::kHalfspace:
      return "halfspace";
    case SetKind::kAffineSubspace:
      return "affine_subspace";
  }
  return "unknown";
}

ConvexSet ConvexSet::Box(Vec lo, Vec hi) {
  RequireSameDim(lo, hi, "Box");
  if (lo.size() < 1) throw InvalidInput("Box: empty dimension");
  if (!lo.allFinite() || !hi.allFinite()) throw InvalidInput("Box: non-finite bounds");
  if ((lo.array() > hi.array()).any()) throw InvalidInput("Box: lo > hi (empty set)");
  ConvexSet s(SetKind::kBox, lo.size());
  s.v1_ = std::move(lo);
  s.v2_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::Ball(Vec center, double radius) {
  if (center.size() < 1) throw InvalidInput("Ball: empty dimension");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("Ball: radius must be finite and >= 0");
  }
  ConvexSet s(SetKind::kBall, center.size());
  s.v1_ = std::move(center);
  s.scalar_ = radius;
  return s;
}

ConvexSet ConvexSet::Halfspace(Vec a, double beta) {
  if (a.size() < 1) throw InvalidInput("Halfspace: empty dimension");
  if (!(a.norm() > 0.0)) throw InvalidInput("Halfspace: zero normal");
  ConvexSet s(SetKind::kHalfspace, a.size());
  s.v1_ = std::move(a);
  s.scalar_ = beta;
  return s;
}

ConvexSet ConvexSet::AffineSubspace(Mat A, Vec c) {
  if (A.rows() != c.size() || A.cols() < 1) {
    throw InvalidInput("AffineSubspace: shape mismatch");
  }
  ConvexSet s(SetKind::kAffineSubspace, A.cols());
  s.pinv_ = A.completeOrthogonalDecomposition().pseudoInverse();
  const Vec x = s.pinv_ * c;
  if ((A * x - c).norm() > 1e-10 * std::max(1.0, c.norm())) {
    throw InvalidInput("AffineSubspace: A x = c has no solution (empty set)");
  }
  s.A_ = std::move(A);
  s.v2_ = std::move(c);
  return s;
}

std::string ConvexSet::Describe() const {
  switch (kind_) {
    case SetKind::kBox:
      return "box";
    case SetKind::kBall:
      return "ball(radius=" + FormatDouble(scalar_) + ")";
    case SetKind::kHalfspace:
      return "halfspace(<a,x> >= " + FormatDouble(scalar_) + ")";
    case SetKind::kAffineSubspace:
      return "affine_subspace(rank constraints=" + std::to_string(A_.rows()) + ")";
  }
  return "set";
}

Vec ConvexSet::Project(const Vec& x) const {
  if (x.size() != dim_) throw InvalidInput("Project: dimension mismatch");
  switch (kind_) {
    case SetKind::kBox:
      return x.cwiseMax(v1_).cwiseMin(v2_);
    case SetKind::kBall: {
      const Vec d = x - v1_;
      const double n = d.norm();
      if (n <= scalar_) return x;
      return v1_ + (scalar_ / n) * d;
    }
    case SetKind::kHalfspace: {
      const double s = v1_.dot(x);
      if (s >= scalar_) return x;
      return x + ((scalar_ - s) / v1_.squaredNorm()) * v1_;
    }
    case SetKind::kAffineSubspace:
      return x - pinv_ * (A_ * x - v2_);
  }
  return x;
}

double ConvexSet::Violation(const Vec& x) const {
  if (x.size() != dim_) throw InvalidInput("Violation: dimension mismatch");
  switch (kind_) {
    case SetKind::kBox:
      return std::max({0.0, (v1_ - x).maxCoeff(), (x - v2_).maxCoeff()});
    case SetKind::kBall:
      return std::max(0.0, (x - v1_).norm() - scalar_);
    case SetKind::kHalfspace:
      return std::max(0.0, (scalar_ - v1_.dot(x)) / v1_.norm());
    case SetKind::kAffineSubspace:
      return (A_ * x - v2_).norm();
  }
  return 0.0;
}

bool ConvexSet::Contains(const Vec& x, double tol) const { return Violation(x) <= tol; }

AveragedOperator ConvexSet::AsOperator() const {
  ConvexSet copy = *this;
  return AveragedOperator("proj_" + std::string(ToString(kind_)), dim_,
                          [copy](const Vec& x) { return copy.Project(x); },
                          GammaCertificate::Derived(0.5));
}

}  // namespace avgnet
