#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "betashap/dataset.hpp"

namespace betashap {

/// Training settings shared by the logistic and ridge fits. The L2 penalty
/// applies to coefficients only; the intercept is never penalized.
struct TrainConfig {
  double l2 = 1.0;
  int max_iterations = 100;
  double tolerance = 1e-8;
};

struct LinearModel {
  std::vector<double> coef;
  double intercept = 0.0;
  bool converged = true;
  int iterations = 0;

  double linear_predictor(std::span<const double> x) const noexcept;
  /// Logistic probability of label 1.
  double probability(std::span<const double> x) const noexcept;
};

/// L2-regularized logistic regression by Newton/IRLS from the zero vector.
///
/// Minimizes sum_i s_i * nll_i + (l2/2)*||coef||^2, where s_i are the optional
/// per-row sample weights (unit when empty). Iterates until the gradient norm
/// is at most `tolerance`; a step that raises the objective is halved. When
/// `max_iterations` is reached the last iterate is returned with
/// converged = false. Requires both classes among `rows`.
LinearModel train_logistic(const Dataset& data, std::span<const std::size_t> rows,
                           const TrainConfig& config, std::span<const double> sample_weights = {});

/// Ridge least squares with an unpenalized intercept (closed form).
LinearModel train_ridge(const Dataset& data, std::span<const std::size_t> rows,
                        const TrainConfig& config, std::span<const double> sample_weights = {});

/// Fraction of points whose thresholded probability (>= 0.5 means 1) matches
/// the label.
double predict_accuracy(const LinearModel& model, const Dataset& validation);

/// Accuracy of always predicting `label`.
double constant_accuracy(double label, const Dataset& validation) noexcept;

/// -mean((y - prediction)^2) for the linear predictor.
double negative_mse(const LinearModel& model, const Dataset& validation);

/// -mean((y - c)^2).
double constant_negative_mse(double c, const Dataset& validation) noexcept;

}  // namespace betashap
