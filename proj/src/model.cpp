#include "betashap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "betashap/error.hpp"

namespace betashap {

namespace {

struct Objective {
  double loss = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Loss, gradient and Hessian of the weighted, penalized negative
// log-likelihood at theta = (coef..., intercept).
void evaluate_logistic(const Dataset& data, std::span<const std::size_t> rows,
                       std::span<const double> weights, double l2, const Eigen::VectorXd& theta,
                       Objective& out) {
  const std::size_t d = data.dim();
  const std::size_t p = d + 1;
  out.gradient.setZero(static_cast<Eigen::Index>(p));
  out.hessian.setZero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  double* g = out.gradient.data();
  double* h = out.hessian.data();  // column-major; upper triangle filled below
  const double* th = theta.data();

  double loss = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    const double* x = data.row(i).data();
    const double s = weights.empty() ? 1.0 : weights[r];
    double eta = th[d];
    for (std::size_t k = 0; k < d; ++k) eta += th[k] * x[k];
    const double e = std::exp(-std::fabs(eta));
    const double prob = eta >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    const double y = data.label(i);
    loss += s * (std::max(eta, 0.0) + std::log1p(e) - y * eta);
    const double resid = s * (prob - y);
    const double curv = s * prob * (1.0 - prob);
    for (std::size_t a = 0; a < d; ++a) {
      g[a] += resid * x[a];
      const double cx = curv * x[a];
      for (std::size_t b = a; b < d; ++b) h[b * p + a] += cx * x[b];
      h[d * p + a] += cx;
    }
    g[d] += resid;
    h[d * p + d] += curv;
  }
  for (std::size_t a = 0; a < d; ++a) {
    loss += 0.5 * l2 * th[a] * th[a];
    g[a] += l2 * th[a];
    h[a * p + a] += l2;
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) h[a * p + b] = h[b * p + a];
  }
  out.loss = loss;
}

LinearModel to_model(const Eigen::VectorXd& theta, bool converged, int iterations) {
  LinearModel model;
  const auto d = static_cast<std::size_t>(theta.size() - 1);
  model.coef.assign(theta.data(), theta.data() + d);
  model.intercept = theta[static_cast<Eigen::Index>(d)];
  model.converged = converged;
  model.iterations = iterations;
  return model;
}

void check_weights(std::span<const std::size_t> rows, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != rows.size()) {
    throw Error(ErrorKind::invalid_parameter, "sample weight count does not match row count");
  }
}

}  // namespace

double LinearModel::linear_predictor(std::span<const double> x) const noexcept {
  double eta = intercept;
  for (std::size_t k = 0; k < coef.size(); ++k) eta += coef[k] * x[k];
  return eta;
}

double LinearModel::probability(std::span<const double> x) const noexcept {
  return 1.0 / (1.0 + std::exp(-linear_predictor(x)));
}

LinearModel train_logistic(const Dataset& data, std::span<const std::size_t> rows,
                           const TrainConfig& config, std::span<const double> sample_weights) {
  check_weights(rows, sample_weights);
  bool has0 = false;
  bool has1 = false;
  for (std::size_t i : rows) (data.label(i) == 1.0 ? has1 : has0) = true;
  if (!has0 || !has1) {
    throw Error(ErrorKind::insufficient_data, "logistic regression needs both classes");
  }

  const auto p = static_cast<Eigen::Index>(data.dim() + 1);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd last_theta = theta;
  Eigen::VectorXd step = Eigen::VectorXd::Zero(p);
  double last_loss = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  Objective obj;
  Eigen::LDLT<Eigen::MatrixXd> solver(p);

  for (int it = 0; it < config.max_iterations; ++it) {
    evaluate_logistic(data, rows, sample_weights, config.l2, theta, obj);
    if (!(obj.loss <= last_loss + 1e-12 * std::fabs(last_loss)) && scale > 0x1.0p-30) {
      scale *= 0.5;
      theta = last_theta - scale * step;
      continue;
    }
    if (obj.gradient.norm() <= config.tolerance) return to_model(theta, true, it);
    solver.compute(obj.hessian);
    step = solver.solve(obj.gradient);
    if (!step.allFinite()) return to_model(theta, false, it);
    last_theta = theta;
    last_loss = obj.loss;
    scale = 1.0;
    theta -= step;
  }
  return to_model(theta, false, config.max_iterations);
}

LinearModel train_ridge(const Dataset& data, std::span<const std::size_t> rows,
                        const TrainConfig& config, std::span<const double> sample_weights) {
  check_weights(rows, sample_weights);
  if (rows.empty()) throw Error(ErrorKind::insufficient_data, "ridge regression needs points");
  const std::size_t d = data.dim();
  const auto p = static_cast<Eigen::Index>(d + 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd xt(p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    const auto x = data.row(i);
    for (std::size_t k = 0; k < d; ++k) xt[static_cast<Eigen::Index>(k)] = x[k];
    xt[p - 1] = 1.0;
    const double s = sample_weights.empty() ? 1.0 : sample_weights[r];
    gram.selfadjointView<Eigen::Upper>().rankUpdate(xt, s);
    rhs += s * data.label(i) * xt;
  }
  gram.diagonal().head(p - 1).array() += config.l2;
  Eigen::VectorXd theta = gram.selfadjointView<Eigen::Upper>().ldlt().solve(rhs);
  if (!theta.allFinite()) theta.setZero();
  return to_model(theta, true, 1);
}

double predict_accuracy(const LinearModel& model, const Dataset& validation) {
  if (model.coef.size() != validation.dim()) {
    throw Error(ErrorKind::invalid_parameter, "model dimension does not match validation data");
  }
  if (validation.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const double predicted = model.probability(validation.row(i)) >= 0.5 ? 1.0 : 0.0;
    if (predicted == validation.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(validation.size());
}

double constant_accuracy(double label, const Dataset& validation) noexcept {
  if (validation.empty()) return 0.0;
  const auto hits = std::count(validation.labels().begin(), validation.labels().end(), label);
  return static_cast<double>(hits) / static_cast<double>(validation.size());
}

double negative_mse(const LinearModel& model, const Dataset& validation) {
  if (model.coef.size() != validation.dim()) {
    throw Error(ErrorKind::invalid_parameter, "model dimension does not match validation data");
  }
  if (validation.empty()) return 0.0;
  double sse = 0.0;
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const double r = validation.label(i) - model.linear_predictor(validation.row(i));
    sse += r * r;
  }
  return -sse / static_cast<double>(validation.size());
}

double constant_negative_mse(double c, const Dataset& validation) noexcept {
  if (validation.empty()) return 0.0;
  double sse = 0.0;
  for (double y : validation.labels()) sse += (y - c) * (y - c);
  return -sse / static_cast<double>(validation.size());
}

}  // namespace betashap
