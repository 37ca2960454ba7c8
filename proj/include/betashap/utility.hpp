#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "betashap/dataset.hpp"
#include "betashap/model.hpp"

namespace betashap {

/// Subset of players 0..n-1 as a packed bitmask (one word per 64 players).
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Coalition from_mask(std::size_t n, std::uint64_t mask);
  static Coalition from_members(std::size_t n, std::span<const std::size_t> members);

  std::size_t universe() const noexcept { return n_; }
  bool contains(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  void insert(std::size_t i) noexcept { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase(std::size_t i) noexcept { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  std::size_t count() const noexcept;
  /// Members in ascending order.
  std::vector<std::size_t> members() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const Coalition&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const noexcept;
};

/// A cooperative game: n players and a utility on every coalition. Calls must
/// be safe from several threads at once.
class Game {
 public:
  virtual ~Game() = default;
  virtual std::size_t size() const noexcept = 0;
  virtual double value(const Coalition& coalition) const = 0;
};

/// Game backed by a callable; handy for synthetic utility tables.
class FunctionGame final : public Game {
 public:
  FunctionGame(std::size_t n, std::function<double(const Coalition&)> fn)
      : n_(n), fn_(std::move(fn)) {}
  std::size_t size() const noexcept override { return n_; }
  double value(const Coalition& c) const override { return fn_(c); }

 private:
  std::size_t n_;
  std::function<double(const Coalition&)> fn_;
};

/// Game with an explicit utility table indexed by bitmask (n <= 20).
class TableGame final : public Game {
 public:
  explicit TableGame(std::vector<double> table);
  std::size_t size() const noexcept override { return n_; }
  double value(const Coalition& c) const override;
  std::span<const double> table() const noexcept { return table_; }

 private:
  std::size_t n_;
  std::vector<double> table_;
};

enum class ModelKind { logistic_regression, linear_regression, constant_predictor };
enum class Metric { accuracy, negative_mse };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Metric metric) noexcept;

struct UtilitySpec {
  ModelKind model = ModelKind::logistic_regression;
  Metric metric = Metric::accuracy;
  Dataset validation;
  TrainConfig training;
};

/// Checks the spec against a training set: non-empty validation, matching
/// dimensions and metric/label compatibility. Throws Error on violation.
void validate_spec(const UtilitySpec& spec, const Dataset& train);

/// Metric of the best constant predictor on the validation set: the majority
/// validation label (ties go to 1) for accuracy, the validation mean for
/// negative MSE.
double constant_baseline(const UtilitySpec& spec);

/// Trains on `rows` of `train` (optionally weighted) and scores on the
/// validation set. Empty subsets, and single-class subsets under accuracy,
/// score the constant baseline.
double score_rows(const UtilitySpec& spec, const Dataset& train,
                  std::span<const std::size_t> rows, std::span<const double> weights = {});

/// Thread-safe memo of coalition utilities, sharded to limit lock contention.
/// Readers share a shard lock; writers take it exclusively. Once `capacity`
/// entries are stored new values are no longer inserted.
class UtilityCache {
 public:
  explicit UtilityCache(std::size_t capacity = std::size_t{1} << 22);

  std::optional<double> find(const Coalition& key) const;
  void insert(const Coalition& key, double value);
  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    mutable std::shared_mutex mutex;
    std::unordered_map<Coalition, double, CoalitionHash> map;
  };
  std::size_t capacity_;
  std::array<Shard, kShards> shards_;
};

/// U(S) for a dataset of valued points: train on S, score on validation.
class DataUtility final : public Game {
 public:
  DataUtility(Dataset train, UtilitySpec spec, std::shared_ptr<UtilityCache> cache = nullptr);

  std::size_t size() const noexcept override { return train_.size(); }
  double value(const Coalition& coalition) const override;

  const Dataset& train() const noexcept { return train_; }
  const UtilitySpec& spec() const noexcept { return spec_; }
  UtilityCache* cache() const noexcept { return cache_.get(); }

 private:
  Dataset train_;
  UtilitySpec spec_;
  std::shared_ptr<UtilityCache> cache_;
};

/// U(subset) for point ids drawn from `data`. Order of ids is irrelevant.
double evaluate_utility(const UtilitySpec& spec, std::span<const PointId> subset,
                        const Dataset& data, UtilityCache* cache = nullptr);

}  // namespace betashap
