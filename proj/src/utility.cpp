#include "betashap/utility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "betashap/error.hpp"
#include "betashap/rng.hpp"

namespace betashap {

Coalition Coalition::from_mask(std::size_t n, std::uint64_t mask) {
  Coalition c(n);
  if (n < 64) mask &= (std::uint64_t{1} << n) - 1;
  if (!c.words_.empty()) c.words_[0] = mask;
  return c;
}

Coalition Coalition::from_members(std::size_t n, std::span<const std::size_t> members) {
  Coalition c(n);
  for (std::size_t i : members) {
    if (i >= n) throw Error(ErrorKind::invalid_parameter, "coalition member out of range");
    c.insert(i);
  }
  return c;
}

std::size_t Coalition::count() const noexcept {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::size_t CoalitionHash::operator()(const Coalition& c) const noexcept {
  std::uint64_t h = c.universe();
  for (std::uint64_t w : c.words()) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

TableGame::TableGame(std::vector<double> table) : n_(0), table_(std::move(table)) {
  if (table_.empty() || !std::has_single_bit(table_.size())) {
    throw Error(ErrorKind::invalid_parameter, "utility table size must be a power of two");
  }
  n_ = static_cast<std::size_t>(std::countr_zero(table_.size()));
  if (n_ > 20) throw Error(ErrorKind::size_limit, "utility tables are limited to n <= 20");
}

double TableGame::value(const Coalition& c) const {
  return table_[c.words().empty() ? 0 : c.words()[0]];
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::logistic_regression: return "logistic-regression";
    case ModelKind::linear_regression: return "linear-regression";
    case ModelKind::constant_predictor: return "constant-predictor-only";
  }
  return "unknown";
}

std::string_view to_string(Metric metric) noexcept {
  return metric == Metric::accuracy ? "accuracy" : "negative-mse";
}

void validate_spec(const UtilitySpec& spec, const Dataset& train) {
  if (spec.validation.empty()) {
    throw Error(ErrorKind::invalid_parameter, "validation set is empty");
  }
  if (spec.validation.dim() != train.dim()) {
    throw Error(ErrorKind::schema_mismatch, "validation and training dimensions differ");
  }
  const LabelKind want = spec.metric == Metric::accuracy ? LabelKind::binary : LabelKind::real;
  if (train.label_kind() != want || spec.validation.label_kind() != want) {
    throw Error(ErrorKind::incompatible_metric,
                std::string(to_string(spec.metric)) + " needs " + std::string(to_string(want)) +
                    " labels");
  }
  const bool model_ok = spec.model == ModelKind::constant_predictor ||
                        (spec.metric == Metric::accuracy) ==
                            (spec.model == ModelKind::logistic_regression);
  if (!model_ok) {
    throw Error(ErrorKind::incompatible_metric, std::string(to_string(spec.model)) +
                                                    " cannot be scored with " +
                                                    std::string(to_string(spec.metric)));
  }
}

double constant_baseline(const UtilitySpec& spec) {
  const auto labels = spec.validation.labels();
  if (labels.empty()) throw Error(ErrorKind::invalid_parameter, "validation set is empty");
  if (spec.metric == Metric::accuracy) {
    const auto ones = std::count(labels.begin(), labels.end(), 1.0);
    const auto zeros = static_cast<std::ptrdiff_t>(labels.size()) - ones;
    return constant_accuracy(ones >= zeros ? 1.0 : 0.0, spec.validation);
  }
  double mean = 0.0;
  for (double y : labels) mean += y;
  mean /= static_cast<double>(labels.size());
  return constant_negative_mse(mean, spec.validation);
}

double score_rows(const UtilitySpec& spec, const Dataset& train,
                  std::span<const std::size_t> rows, std::span<const double> weights) {
  if (rows.empty()) return constant_baseline(spec);

  if (spec.metric == Metric::accuracy) {
    double w1 = 0.0;
    double w0 = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double s = weights.empty() ? 1.0 : weights[r];
      (train.label(rows[r]) == 1.0 ? w1 : w0) += s;
    }
    if (w1 == 0.0 || w0 == 0.0) return constant_baseline(spec);
    if (spec.model == ModelKind::constant_predictor) {
      return constant_accuracy(w1 >= w0 ? 1.0 : 0.0, spec.validation);
    }
    return predict_accuracy(train_logistic(train, rows, spec.training, weights), spec.validation);
  }

  if (spec.model == ModelKind::constant_predictor) {
    double total = 0.0;
    double mass = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double s = weights.empty() ? 1.0 : weights[r];
      total += s * train.label(rows[r]);
      mass += s;
    }
    return constant_negative_mse(total / mass, spec.validation);
  }
  return negative_mse(train_ridge(train, rows, spec.training, weights), spec.validation);
}

UtilityCache::UtilityCache(std::size_t capacity) : capacity_(capacity) {}

std::optional<double> UtilityCache::find(const Coalition& key) const {
  const Shard& shard = shards_[CoalitionHash{}(key) % kShards];
  std::shared_lock lock(shard.mutex);
  const auto it = shard.map.find(key);
  if (it == shard.map.end()) return std::nullopt;
  return it->second;
}

void UtilityCache::insert(const Coalition& key, double value) {
  Shard& shard = shards_[CoalitionHash{}(key) % kShards];
  std::unique_lock lock(shard.mutex);
  if (shard.map.size() >= capacity_ / kShards + 1) return;
  shard.map.emplace(key, value);
}

std::size_t UtilityCache::size() const {
  std::size_t total = 0;
  for (const Shard& shard : shards_) {
    std::shared_lock lock(shard.mutex);
    total += shard.map.size();
  }
  return total;
}

DataUtility::DataUtility(Dataset train, UtilitySpec spec, std::shared_ptr<UtilityCache> cache)
    : train_(std::move(train)), spec_(std::move(spec)), cache_(std::move(cache)) {
  validate_spec(spec_, train_);
}

double DataUtility::value(const Coalition& coalition) const {
  if (coalition.universe() != train_.size()) {
    throw Error(ErrorKind::invalid_parameter, "coalition size does not match dataset");
  }
  if (cache_) {
    if (const auto hit = cache_->find(coalition)) return *hit;
  }
  const auto rows = coalition.members();
  const double result = score_rows(spec_, train_, rows);
  if (cache_) cache_->insert(coalition, result);
  return result;
}

double evaluate_utility(const UtilitySpec& spec, std::span<const PointId> subset,
                        const Dataset& data, UtilityCache* cache) {
  validate_spec(spec, data);
  Coalition coalition(data.size());
  for (PointId id : subset) {
    const auto index = data.index_of(id);
    if (!index) throw Error(ErrorKind::invalid_parameter, "unknown point id " + std::to_string(id));
    coalition.insert(*index);
  }
  if (cache) {
    if (const auto hit = cache->find(coalition)) return *hit;
  }
  const auto rows = coalition.members();
  const double result = score_rows(spec, data, rows);
  if (cache) cache->insert(coalition, result);
  return result;
}

}  // namespace betashap
