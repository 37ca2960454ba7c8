#include "betashap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "betashap/error.hpp"
#include "betashap/rng.hpp"

namespace betashap {

namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

std::vector<double> fixed_coefficients(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::gaussian_classification:
    case SyntheticKind::gaussian_regression: return {2.0, 1.0, 0.0, 0.0, 0.0};
    case SyntheticKind::snr_classification: return {5.0, 0.0, 0.0};
    case SyntheticKind::snr_regression: break;
  }
  return {};
}

}  // namespace

std::vector<double> classification_coefficients(SyntheticKind kind) {
  if (!is_classification(kind)) {
    throw Error(ErrorKind::invalid_parameter, "not a classification kind");
  }
  return fixed_coefficients(kind);
}

std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::gaussian_classification: return "gaussian-classification";
    case SyntheticKind::gaussian_regression: return "gaussian-regression";
    case SyntheticKind::snr_regression: return "snr-regression";
    case SyntheticKind::snr_classification: return "snr-classification";
  }
  return "unknown";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view text) noexcept {
  for (auto kind : {SyntheticKind::gaussian_classification, SyntheticKind::gaussian_regression,
                    SyntheticKind::snr_regression, SyntheticKind::snr_classification}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::size_t dimension_of(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::gaussian_classification:
    case SyntheticKind::gaussian_regression: return 5;
    case SyntheticKind::snr_regression: return 10;
    case SyntheticKind::snr_classification: return 3;
  }
  return 0;
}

bool is_classification(SyntheticKind kind) noexcept {
  return kind == SyntheticKind::gaussian_classification ||
         kind == SyntheticKind::snr_classification;
}

std::vector<double> snr_regression_coefficients(std::uint64_t seed) {
  Rng rng(derive_seed(seed, to_string(SyntheticKind::snr_regression)));
  std::vector<double> beta(10);
  for (double& b : beta) b = rng.normal();
  return beta;
}

Dataset generate(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "generator needs n >= 1");
  const std::size_t d = dimension_of(kind);
  Rng rng(derive_seed(seed, to_string(kind)));
  std::vector<double> beta = fixed_coefficients(kind);
  if (kind == SyntheticKind::snr_regression) {
    for (std::size_t k = 0; k < d; ++k) beta.push_back(rng.normal());
  }
  std::vector<double> features(n * d);
  std::vector<double> labels(n);
  const bool classify = is_classification(kind);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double x = rng.normal();
      features[i * d + k] = x;
      eta += beta[k] * x;
    }
    labels[i] = classify ? (rng.uniform() < logistic(eta) ? 1.0 : 0.0) : eta + rng.normal();
  }
  return Dataset::with_row_ids(d, std::move(features), std::move(labels),
                               classify ? LabelKind::binary : LabelKind::real);
}

Dataset gen_gaussian_classification(std::size_t n, std::uint64_t seed) {
  return generate(SyntheticKind::gaussian_classification, n, seed);
}

std::size_t flip_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0) || !(fraction < 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "flip fraction must lie in [0, 1)");
  }
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

std::pair<Dataset, NoiseRecord> flip_labels(const Dataset& data, double fraction,
                                            std::uint64_t seed) {
  if (data.label_kind() != LabelKind::binary) {
    throw Error(ErrorKind::invalid_parameter, "label flipping needs binary labels");
  }
  const std::size_t count = flip_count(fraction, data.size());
  std::vector<std::size_t> pool(data.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "flip-labels"));
  partial_shuffle(rng, pool, count);
  NoiseRecord record;
  record.fraction = fraction;
  for (std::size_t s = 0; s < count; ++s) record.flipped_ids.push_back(data.id(pool[s]));
  std::sort(record.flipped_ids.begin(), record.flipped_ids.end());
  return {apply_flips(data, record), std::move(record)};
}

Dataset apply_flips(const Dataset& data, const NoiseRecord& record) {
  if (data.label_kind() != LabelKind::binary) {
    throw Error(ErrorKind::invalid_parameter, "label flipping needs binary labels");
  }
  std::vector<double> labels(data.labels().begin(), data.labels().end());
  for (PointId id : record.flipped_ids) {
    const auto index = data.index_of(id);
    if (!index) throw Error(ErrorKind::invalid_parameter, "noise record names unknown id");
    labels[*index] = 1.0 - labels[*index];
  }
  return data.with_labels(std::move(labels));
}

}  // namespace betashap
