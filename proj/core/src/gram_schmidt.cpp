#include "avgnet/gram_schmidt.hpp"

#include "avgnet/format.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace avgnet {

namespace {

void CheckShapes(const RandomVariableSample& x, const RandomVariableSample& y) {
  if (x.samples.rows() != y.samples.rows() || x.samples.cols() != y.samples.cols()) {
    throw InvalidInput("random variables must have the same draws x components shape");
  }
}

double ConditionNumber(const Mat& gram) {
  Eigen::JacobiSVD<Mat> svd(gram);
  const Vec& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smallest = s[s.size() - 1];
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smallest;
}

}  // namespace

double InnerProduct(const RandomVariableSample& x, const RandomVariableSample& y) {
  CheckShapes(x, y);
  if (x.draws() == 0) throw InvalidInput("random variable has no draws");
  return x.samples.cwiseProduct(y.samples).sum() / static_cast<double>(x.draws());
}

Mat GramMatrix(const GsFamily& family) {
  const auto n = static_cast<Index>(family.size());
  Mat g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      g(i, j) = g(j, i) = InnerProduct(family[i], family[j]);
    }
  }
  return g;
}

RandomVariableSample Project(const RandomVariableSample& x_i,
                             const RandomVariableSample& x_j) {
  const double denom = InnerProduct(x_i, x_i);
  if (!(denom > 0.0)) throw InvalidInput("cannot project onto a zero random variable");
  return {(InnerProduct(x_j, x_i) / denom) * x_i.samples};
}

GsRun GsNetworkRun(const GsFamily& family, double max_condition) {
  if (family.empty()) throw InvalidInput("empty family");
  const RandomVariableSample& first = family.front();
  if (first.draws() < 2) throw InvalidInput("random variables need at least 2 draws");
  for (const auto& m : family) CheckShapes(first, m);

  const Mat gram_in = GramMatrix(family);
  const double cond = ConditionNumber(gram_in);
  if (!(cond <= max_condition)) {
    throw InvalidInput("family is numerically dependent: Gram condition number " +
                       FormatDouble(cond) + " exceeds " + FormatDouble(max_condition));
  }

  const auto n = static_cast<Index>(family.size());
  GsRun run;
  run.orthonormal = family;
  run.r = Mat::Zero(n, n);
  GsFamily& y = run.orthonormal;
  for (Index k = 0; k < n; ++k) {
    // Layer k: normalize y_k, then strip its component from later members.
    const double norm = std::sqrt(InnerProduct(y[k], y[k]));
    if (!(norm > 0.0)) throw InvalidInput("member " + std::to_string(k) + " is zero");
    y[k].samples /= norm;
    run.r(k, k) = norm;
    for (Index j = k + 1; j < n; ++j) {
      const double c = InnerProduct(y[j], y[k]);
      run.r(k, j) = c;
      y[j].samples -= c * y[k].samples;
    }
  }
  run.gram = GramMatrix(y);
  return run;
}

IdempotenceReport IdempotenceCheck(const GsFamily& family, double tol) {
  IdempotenceReport rep;
  rep.first = GsNetworkRun(family);
  rep.second = GsNetworkRun(rep.first.orthonormal);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Mat diff = rep.second.orthonormal[k].samples - rep.first.orthonormal[k].samples;
    rep.max_entry_change = std::max(rep.max_entry_change, diff.cwiseAbs().maxCoeff());
  }
  rep.idempotent = rep.max_entry_change <= tol;
  return rep;
}

LinearPredictor BestLinearPredictor(const Mat& x, const Mat& y, double max_condition) {
  if (x.rows() != y.rows()) throw InvalidInput("x and y must have the same draws");
  if (x.rows() < 2) throw InvalidInput("need at least 2 draws");
  const Index k = x.cols();
  const Index draws = x.rows();
  GsFamily family;
  family.push_back({Mat::Ones(draws, 1)});
  for (Index j = 0; j < k; ++j) family.push_back({x.col(j)});

  GsRun run;
  try {
    run = GsNetworkRun(family, max_condition);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("singular covariance: ") + e.what());
  }

  LinearPredictor out;
  out.fitted = Mat::Zero(draws, y.cols());
  out.intercept.resize(y.cols());
  out.B.resize(y.cols(), k);
  for (Index m = 0; m < y.cols(); ++m) {
    const RandomVariableSample target{y.col(m)};
    Vec coeff(k + 1);  // coordinates in the orthonormal basis
    for (Index i = 0; i <= k; ++i) {
      coeff[i] = InnerProduct(target, run.orthonormal[i]);
      out.fitted.col(m) += coeff[i] * run.orthonormal[i].samples.col(0);
    }
    // Back to the basis {1, x_1, ..., x_k}: solve R c = coeff.
    const Vec c = run.r.triangularView<Eigen::Upper>().solve(coeff);
    out.intercept[m] = c[0];
    out.B.row(m) = c.tail(k).transpose();
  }
  return out;
}

}  // namespace avgnet
