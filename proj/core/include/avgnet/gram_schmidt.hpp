#pragma once

#include "avgnet/types.hpp"

#include <vector>

namespace avgnet {

/// Empirical random variable: N draws (rows) of a d-component vector.
struct RandomVariableSample {
  Mat samples;

  Index draws() const { return samples.rows(); }
  Index components() const { return samples.cols(); }
};

using GsFamily = std::vector<RandomVariableSample>;

// <x, y> = mean over draws of x_n . y_n
double InnerProduct(const RandomVariableSample& x, const RandomVariableSample& y);

// Gram matrix G_ij = <x_i, x_j>.
Mat GramMatrix(const GsFamily& family);

// P_{x_i}(x_j) = (<x_j, x_i> / <x_i, x_i>) x_i. Rejects x_i = 0.
RandomVariableSample Project(const RandomVariableSample& x_i,
                             const RandomVariableSample& x_j);

struct GsRun {
  GsFamily orthonormal;
  // Upper-triangular coefficients: members[k] = sum_{i<=k} r(i, k) orthonormal[i].
  Mat r;
  Mat gram;  // Gram matrix of the output
};

/// Runs the projection network: layer k removes the component along the
/// k-th normalized member from every later member, the last layer
/// normalizes. Rejects families whose Gram condition number exceeds
/// `max_condition` (or with a zero member).
GsRun GsNetworkRun(const GsFamily& family, double max_condition = 1e12);

struct IdempotenceReport {
  GsRun first;
  GsRun second;
  double max_entry_change = 0.0;  // max |X2 - X1| over all entries
  bool idempotent = false;
};

IdempotenceReport IdempotenceCheck(const GsFamily& family, double tol = 1e-12);

struct LinearPredictor {
  Vec intercept;  // m
  Mat B;          // m x k
  Mat fitted;     // N x m
};

/// Projection of each column of y (N x m) onto span{1, x_1, ..., x_k} for
/// x (N x k), computed through the Gram-Schmidt network. Equals
/// E[Y] + cov(Y, X) cov(X, X)^-1 (X - E[X]). Rejects singular covariance.
LinearPredictor BestLinearPredictor(const Mat& x, const Mat& y,
                                    double max_condition = 1e12);

}  // namespace avgnet
