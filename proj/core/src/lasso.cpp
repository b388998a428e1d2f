#include "mdcv/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdcv/design.hpp"
#include "mdcv/error.hpp"
#include "mdcv/frame.hpp"

namespace mdcv {

namespace {

struct Standardized {
  Eigen::MatrixXd x;       // centred and scaled; constant columns are zero
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd yc;      // centred outcome
  double y_mean = 0.0;
};

void check_inputs(const Eigen::MatrixXd& x, std::span<const double> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw SchemaError("design rows differ from outcome length");
  if (x.rows() < 2) throw InvalidConfiguration("lasso needs at least 2 rows");
  if (x.cols() < 1) throw InvalidConfiguration("lasso needs at least 1 predictor");
  if (!x.allFinite()) throw NumericError("design matrix has non-finite entries");
  for (double v : y)
    if (!std::isfinite(v)) throw NumericError("outcome has non-finite entries");
}

Standardized standardize(const Eigen::MatrixXd& x, std::span<const double> y) {
  const auto n = x.rows();
  const auto p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Standardized s;
  s.mean = x.colwise().mean().transpose();
  s.sd.resize(p);
  s.x.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    auto centred = x.col(j).array() - s.mean(j);
    const double var = centred.square().sum() * inv_n;
    const double sd = std::sqrt(var);
    // Treat columns whose spread is at rounding level as constant.
    const double scale = std::max(1.0, std::abs(s.mean(j)));
    if (sd > 1e-12 * scale) {
      s.sd(j) = sd;
      s.x.col(j) = centred / sd;
    } else {
      s.sd(j) = 0.0;
      s.x.col(j).setZero();
    }
  }
  double ysum = 0.0;
  for (double v : y) ysum += v;
  s.y_mean = ysum * inv_n;
  s.yc.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.yc(i) = y[static_cast<std::size_t>(i)] - s.y_mean;
  return s;
}

double default_ratio(const Eigen::MatrixXd& x) { return x.rows() > x.cols() ? 1e-4 : 1e-2; }

std::vector<double> log_spaced(double top, double ratio, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = top;
    return out;
  }
  const double step = std::log(ratio) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = top * std::exp(step * i);
  out[0] = top;
  return out;
}

// Covariance-update coordinate descent: keeps g = c - G b current and only
// materializes the Gram columns of variables that have ever been nonzero.
class CoordinateDescent {
 public:
  explicit CoordinateDescent(const Standardized& s)
      : s_(s), n_(s.x.rows()), p_(s.x.cols()), gram_(static_cast<std::size_t>(p_)),
        has_gram_(static_cast<std::size_t>(p_), 0) {
    const double inv_n = 1.0 / static_cast<double>(n_);
    c_ = s.x.transpose() * s.yc * inv_n;
    d_ = s.x.colwise().squaredNorm().transpose() * inv_n;
    yy_ = s.yc.squaredNorm() * inv_n;
    g_ = c_;
    b_ = Eigen::VectorXd::Zero(p_);
  }

  // Returns the number of sweeps; `ok` is cleared when the cap is hit.
  int solve(double lambda, const LassoOptions& opt, bool& ok, std::vector<double>* trace) {
    int sweeps = 0;
    while (true) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < p_; ++j) max_delta = std::max(max_delta, update(j, lambda));
      ++sweeps;
      if (trace) trace->push_back(objective(lambda));
      if (max_delta < opt.tolerance) return sweeps;
      if (sweeps >= opt.max_sweeps) {
        ok = false;
        return sweeps;
      }
    }
  }

  const Eigen::VectorXd& coefficients() const { return b_; }

  // (1/2n)||yc - Xb||^2 + lambda |b|_1 written through c and g.
  double objective(double lambda) const {
    return 0.5 * yy_ - 0.5 * b_.dot(c_ + g_) + lambda * b_.lpNorm<1>();
  }

 private:
  // One soft-threshold update of coordinate j; returns |change|.
  double update(Eigen::Index j, double lambda) {
    const double dj = d_(j);
    if (dj <= 0.0) return 0.0;
    const double bj = b_(j);
    const double nb = soft_threshold(g_(j) + dj * bj, lambda) / dj;
    const double delta = nb - bj;
    if (delta == 0.0) return 0.0;
    g_.noalias() -= gram(j) * delta;
    b_(j) = nb;
    return std::abs(delta);
  }

  const Eigen::VectorXd& gram(Eigen::Index j) {
    const auto idx = static_cast<std::size_t>(j);
    if (!has_gram_[idx]) {
      gram_[idx] = s_.x.transpose() * s_.x.col(j) / static_cast<double>(n_);
      has_gram_[idx] = 1;
    }
    return gram_[idx];
  }

  const Standardized& s_;
  Eigen::Index n_, p_;
  Eigen::VectorXd c_, d_, g_, b_;
  double yy_ = 0.0;
  std::vector<Eigen::VectorXd> gram_;
  std::vector<std::uint8_t> has_gram_;
};

LassoPath solve_path(const Standardized& s, std::span<const double> lambdas,
                     const LassoOptions& options) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i]))
      throw InvalidConfiguration("lambda values must be finite and >= 0");
    if (i > 0 && lambdas[i] > lambdas[i - 1])
      throw InvalidConfiguration("lambda sequence must be non-increasing");
  }
  const auto p = s.x.cols();
  const auto L = static_cast<Eigen::Index>(lambdas.size());
  LassoPath path;
  path.lambdas.assign(lambdas.begin(), lambdas.end());
  path.x_mean = s.mean;
  path.x_sd = s.sd;
  path.y_mean = s.y_mean;
  path.coefficients.resize(p, L);
  path.std_coefficients.resize(p, L);
  path.intercepts.resize(lambdas.size());
  path.sweeps.resize(lambdas.size());
  if (options.record_objective) path.objective_trace.resize(lambdas.size());

  CoordinateDescent cd(s);
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto li = static_cast<std::size_t>(l);
    bool ok = true;
    path.sweeps[li] = cd.solve(lambdas[li], options, ok,
                               options.record_objective ? &path.objective_trace[li] : nullptr);
    path.converged = path.converged && ok;
    const auto& b = cd.coefficients();
    path.std_coefficients.col(l) = b;
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double beta = s.sd(j) > 0.0 ? b(j) / s.sd(j) : 0.0;
      path.coefficients(j, l) = beta;
      shift += beta * s.mean(j);
    }
    path.intercepts[li] = s.y_mean - shift;
  }
  return path;
}

}  // namespace

Eigen::VectorXd LassoPath::predict(const Eigen::MatrixXd& x, std::size_t index) const {
  Eigen::VectorXd out = x * coefficients.col(static_cast<Eigen::Index>(index));
  out.array() += intercepts.at(index);
  return out;
}

Eigen::MatrixXd LassoPath::predict_all(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x * coefficients;
  for (Eigen::Index l = 0; l < out.cols(); ++l)
    out.col(l).array() += intercepts[static_cast<std::size_t>(l)];
  return out;
}

std::vector<double> lambda_sequence(const Eigen::MatrixXd& x, std::span<const double> y,
                                    const LassoOptions& options) {
  check_inputs(x, y);
  if (options.n_lambda < 1) throw InvalidConfiguration("n_lambda must be >= 1");
  const double ratio = options.lambda_min_ratio.value_or(default_ratio(x));
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidConfiguration("lambda_min_ratio must lie in (0, 1)");
  const auto s = standardize(x, y);
  const double lambda_max =
      (s.x.transpose() * s.yc).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
  return log_spaced(lambda_max, ratio, options.n_lambda);
}

LassoPath lasso_path(const Eigen::MatrixXd& x, std::span<const double> y,
                     const LassoOptions& options) {
  const auto lambdas = lambda_sequence(x, y, options);
  return lasso_path(x, y, lambdas, options);
}

LassoPath lasso_path(const Eigen::MatrixXd& x, std::span<const double> y,
                     std::span<const double> lambdas, const LassoOptions& options) {
  check_inputs(x, y);
  if (lambdas.empty()) throw InvalidConfiguration("lambda sequence is empty");
  return solve_path(standardize(x, y), lambdas, options);
}

Eigen::VectorXd LassoCvFit::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out = x * coefficients;
  out.array() += intercept;
  return out;
}

LassoCvFit cv_lasso(const Eigen::MatrixXd& x, std::span<const double> y, int v,
                    std::uint64_t seed, const LassoOptions& options) {
  check_inputs(x, y);
  const auto n = static_cast<std::size_t>(x.rows());
  if (v < 2 || n < 2 * static_cast<std::size_t>(v))
    throw InvalidConfiguration("cv_lasso needs v >= 2 and n >= 2v (n=" + std::to_string(n) +
                               ", v=" + std::to_string(v) + ")");
  LassoCvFit fit;
  fit.path = lasso_path(x, y, options);
  const auto& lambdas = fit.path.lambdas;
  const auto L = lambdas.size();

  const Eigen::Map<const Eigen::VectorXd> y_all(y.data(), static_cast<Eigen::Index>(n));
  const FoldPlan plan = make_folds(n, v, seed);
  std::vector<double> sse(L, 0.0);
  for (int f = 0; f < v; ++f) {
    const auto train_rows = plan.rows_not_in(f);
    const auto test_rows = plan.rows_in(f);
    const Eigen::MatrixXd xa = take_rows(x, train_rows);
    const Eigen::VectorXd ya = take_rows(Eigen::VectorXd(y_all), train_rows);
    const auto fold_path =
        lasso_path(xa, std::span<const double>(ya.data(), static_cast<std::size_t>(ya.size())),
                   lambdas, options);
    fit.path.converged = fit.path.converged && fold_path.converged;
    const Eigen::MatrixXd pred = fold_path.predict_all(take_rows(x, test_rows));
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const double truth = y[test_rows[i]];
      for (std::size_t l = 0; l < L; ++l) {
        const double e = truth - pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
        sse[l] += e * e;
      }
    }
  }
  fit.cv_rmse.resize(L);
  for (std::size_t l = 0; l < L; ++l) fit.cv_rmse[l] = std::sqrt(sse[l] / static_cast<double>(n));
  fit.best = static_cast<std::size_t>(std::min_element(fit.cv_rmse.begin(), fit.cv_rmse.end()) -
                                      fit.cv_rmse.begin());
  fit.lambda = lambdas[fit.best];
  fit.coefficients = fit.path.coefficients.col(static_cast<Eigen::Index>(fit.best));
  fit.intercept = fit.path.intercepts[fit.best];
  return fit;
}

double kkt_violation(const Eigen::MatrixXd& x, std::span<const double> y, const LassoPath& path,
                     std::size_t index) {
  const auto s = standardize(x, y);
  const Eigen::VectorXd b = path.std_coefficients.col(static_cast<Eigen::Index>(index));
  const Eigen::VectorXd r = s.yc - s.x * b;
  const Eigen::VectorXd grad = s.x.transpose() * r / static_cast<double>(x.rows());
  const double lambda = path.lambdas.at(index);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (s.sd(j) == 0.0) continue;
    if (b(j) == 0.0)
      worst = std::max(worst, std::abs(grad(j)) - lambda);
    else
      worst = std::max(worst, std::abs(grad(j) - lambda * (b(j) > 0 ? 1.0 : -1.0)));
  }
  return worst;
}

}  // namespace mdcv
