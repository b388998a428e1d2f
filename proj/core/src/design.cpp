#include "mdcv/design.hpp"

#include "mdcv/error.hpp"

namespace mdcv {

Eigen::MatrixXd design_matrix(const Frame& frame) {
  Eigen::Index width = 0;
  for (auto j : frame.predictor_indices()) {
    const auto& col = frame.column(j);
    width += col.is_numeric() ? 1 : static_cast<Eigen::Index>(col.levels().size()) - 1;
  }
  const auto n = static_cast<Eigen::Index>(frame.n_rows());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, std::max<Eigen::Index>(width, 0));
  Eigen::Index out = 0;
  for (auto j : frame.predictor_indices()) {
    const auto& col = frame.column(j);
    if (col.missing_count() > 0)
      throw PreconditionError("column '" + col.name() + "' has missing cells; impute before modeling");
    if (col.is_numeric()) {
      for (Eigen::Index i = 0; i < n; ++i) x(i, out) = col.value(static_cast<std::size_t>(i));
      ++out;
    } else {
      const auto dummies = static_cast<Eigen::Index>(col.levels().size()) - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto code = col.code(static_cast<std::size_t>(i));
        if (code > 0) x(i, out + code - 1) = 1.0;
      }
      out += std::max<Eigen::Index>(dummies, 0);
    }
  }
  return x;
}

std::vector<std::string> design_names(const Frame& frame) {
  std::vector<std::string> names;
  for (auto j : frame.predictor_indices()) {
    const auto& col = frame.column(j);
    if (col.is_numeric()) {
      names.push_back(col.name());
    } else {
      for (std::size_t l = 1; l < col.levels().size(); ++l)
        names.push_back(col.name() + "=" + col.levels()[l]);
    }
  }
  return names;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), c) = x(static_cast<Eigen::Index>(rows[i]), c);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace mdcv
