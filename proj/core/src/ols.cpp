#include "mdcv/ols.hpp"

#include <cmath>

#include "mdcv/error.hpp"

namespace mdcv {

Eigen::VectorXd LinearFit::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out = x * coefficients;
  out.array() += intercept;
  return out;
}

LinearFit ols_fit(const Eigen::MatrixXd& x, std::span<const double> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw SchemaError("design rows differ from outcome length");
  if (x.rows() < 1) throw InvalidConfiguration("least squares needs at least one row");
  if (!x.allFinite()) throw NumericError("design matrix has non-finite entries");
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), x.rows());
  if (!yv.allFinite()) throw NumericError("outcome has non-finite entries");

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double y_mean = yv.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean;
  const Eigen::VectorXd yc = yv.array() - y_mean;

  LinearFit fit;
  if (x.cols() == 0) {
    fit.coefficients.resize(0);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    fit.coefficients = cod.solve(yc);
  }
  fit.intercept = y_mean - mean.dot(fit.coefficients);
  return fit;
}

}  // namespace mdcv
