#pragma once

#include "avgnet/operator_core.hpp"

#include <string>

namespace avgnet {

enum class SetKind { kBox, kBall, kHalfspace, kAffineSubspace };

std::string_view ToString(SetKind k);

/// Nonempty closed convex set with an exact projector.
class ConvexSet {
 public:
  // {x : lo <= x <= hi}
  static ConvexSet Box(Vec lo, Vec hi);
  // {x : |x - center| <= radius}; radius 0 is the single point `center`.
  static ConvexSet Ball(Vec center, double radius);
  // {x : <a, x> >= beta}
  static ConvexSet Halfspace(Vec a, double beta);
  // {x : A x = c}; rejected when inconsistent.
  static ConvexSet AffineSubspace(Mat A, Vec c);

  SetKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  std::string Describe() const;

  Vec Project(const Vec& x) const;
  // Membership predicate, independent of the projector.
  bool Contains(const Vec& x, double tol) const;
  // How far the predicate is from holding (0 inside).
  double Violation(const Vec& x) const;

  // Projections are firmly nonexpansive: gamma = 1/2.
  AveragedOperator AsOperator() const;

 private:
  ConvexSet(SetKind kind, Index dim) : kind_(kind), dim_(dim) {}

  SetKind kind_;
  Index dim_;
  Vec v1_, v2_;  // box lo/hi, ball center, halfspace normal, affine c
  double scalar_ = 0.0;  // ball radius, halfspace offset
  Mat A_, pinv_;
};

}  // namespace avgnet
