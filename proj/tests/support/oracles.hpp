#pragma once

#include <avgnet/types.hpp>

#include <vector>

namespace avgnet::testing {

// Textbook classical Gram-Schmidt on the columns of `a` under the inner
// product <u, v> = u . v / draws (columns are flattened random variables).
inline Mat ClassicalGramSchmidt(const Mat& a, double draws) {
  Mat q(a.rows(), a.cols());
  for (Index k = 0; k < a.cols(); ++k) {
    Vec v = a.col(k);
    for (Index i = 0; i < k; ++i) {
      v -= (a.col(k).dot(q.col(i)) / draws) * q.col(i);
    }
    q.col(k) = v / std::sqrt(v.dot(v) / draws);
  }
  return q;
}

// Least-squares fit y ~ c + B x via a Householder QR of [1 X].
struct LeastSquaresFit {
  Vec intercept;
  Mat B;
};

inline LeastSquaresFit LeastSquares(const Mat& x, const Mat& y) {
  Mat design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  const Mat coef = design.colPivHouseholderQr().solve(y);  // (k+1) x m
  return {coef.row(0).transpose(), coef.bottomRows(x.cols()).transpose()};
}

}  // namespace avgnet::testing
