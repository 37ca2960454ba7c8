#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "betashap/dataset.hpp"
#include "betashap/synthetic.hpp"
#include "betashap/utility.hpp"
#include "betashap/valuation.hpp"

namespace betashap {

// ---------------------------------------------------------------------------
// Noisy-label detection

/// Lloyd's 2-means on scalars, initialized at (min, max). A value goes to the
/// low cluster when it is at least as close to the low center.
struct TwoMeans {
  double low_center = 0.0;
  double high_center = 0.0;
  std::vector<bool> in_low;
  int iterations = 0;
  bool degenerate = false;  // all values equal
};

TwoMeans two_means_1d(std::span<const double> values);

struct SelectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1 of `selected` against `flipped`. Empty
/// denominators give 0.
SelectionScore score_selection(std::span<const PointId> selected, std::span<const PointId> flipped);

struct DetectionResult {
  std::vector<PointId> selected;  // ascending
  double low_center = 0.0;
  double high_center = 0.0;
  double threshold = 0.0;
  SelectionScore score;
  bool degenerate = false;
};

/// Clusters the values into two groups and flags every point whose value is
/// at most the mean of the lower cluster. All-equal values select nothing.
DetectionResult detect_noisy(const ValueVector& values, const NoiseRecord& record);

// ---------------------------------------------------------------------------
// Learning with subsamples

struct SubsampleResult {
  double keep_fraction = 0.0;
  std::vector<PointId> sampled_ids;   // in draw order
  std::vector<double> train_weights;  // per sampled point, mean one
  double accuracy = 0.0;
  /// Fewer positive-value points than the requested sample size; every
  /// positive point was used instead.
  bool insufficient_positive_values = false;
};

/// Draws round(keep * n) points without replacement with probability
/// proportional to max(value, 0), fits the model with inverse-importance
/// sample weights (rescaled to mean one) and scores it on `test`.
SubsampleResult subsample_train_eval(const Dataset& data, const ValueVector& values,
                                     const UtilitySpec& spec, const Dataset& test,
                                     double keep_fraction, std::uint64_t seed);

/// Uniform subsample of the same size with unit weights.
SubsampleResult subsample_uniform(const Dataset& data, const UtilitySpec& spec, const Dataset& test,
                                  double keep_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Point addition and removal

enum class CurveDirection { add, remove };
enum class CurveOrder { by_value, random };

std::string_view to_string(CurveDirection d) noexcept;
std::string_view to_string(CurveOrder o) noexcept;

struct CurveOptions {
  CurveDirection direction = CurveDirection::remove;
  CurveOrder order = CurveOrder::by_value;
  std::size_t steps = 0;  // 0 means n / 2
  std::size_t initial_size = 10;
  std::uint64_t seed = 0;
};

struct CurveResult {
  CurveDirection direction = CurveDirection::remove;
  CurveOrder order = CurveOrder::by_value;
  std::vector<PointId> initial_set;  // addition only, ascending
  std::vector<PointId> sequence;     // ids added or removed, in order
  std::vector<double> utility;       // steps + 1 entries; entry 0 is the start
  double relative_area = 0.0;
};

/// Removal drops lowest values first from the full set; addition grows a
/// random initial set with the highest-valued remaining points first. Ties
/// order by ascending id.
/// relative_area = sum_{k=1..steps} (utility[k] - utility[0]).
CurveResult point_curve(const Game& game, std::span<const PointId> ids,
                        std::span<const double> values, const CurveOptions& options);

CurveResult point_curve(const Dataset& data, const ValueVector& values, const UtilitySpec& spec,
                        const CurveOptions& options);

// ---------------------------------------------------------------------------
// Signal-to-noise scan of marginal contributions

struct SnrOptions {
  SyntheticKind kind = SyntheticKind::snr_classification;
  std::size_t n = 500;
  std::vector<std::size_t> grid{2, 50, 150, 400};
  std::size_t repeats = 50;
  std::size_t samples = 50;  // random subsets per cardinality and repeat
  std::size_t validation_size = 0;  // 0 means n
  bool flip_target = false;  // give the target the less likely label
  double background_flip = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  TrainConfig training;
};

struct SnrRow {
  std::size_t j = 0;
  double mean = 0.0;                    // mean over repeats of the Delta_j estimate
  double std = 0.0;                     // sample std over repeats
  std::optional<double> snr;            // |mean| / std, missing when std = 0
  double zeta = 0.0;                    // pooled variance of U(S + z) - U(S)
  std::optional<double> zeta_ratio;     // zeta_j / ((j - 1) * zeta_2)
};

struct SnrProfile {
  SnrOptions options;
  double target_label = 0.0;
  double zeta_reference = 0.0;  // zeta at cardinality 2
  std::vector<SnrRow> rows;     // one per grid entry, grid order
  std::vector<std::vector<double>> estimates;  // [repeat][grid index]
};

/// Scores rows of a training set (the last row is the target point).
using ScoreFn = std::function<double(const Dataset& train, std::span<const std::size_t> rows)>;

/// Fixes a target point and a validation set, then for each repeat draws a
/// fresh background of n - 1 points and estimates Delta_j of the target by
/// averaging U(S + z) - U(S) over `samples` random subsets S of size j - 1.
SnrProfile snr_scan(const SnrOptions& options);
SnrProfile snr_scan(const SnrOptions& options, const ScoreFn& score);

/// The utility spec snr_scan uses for a synthetic kind.
UtilitySpec default_spec_for(SyntheticKind kind, Dataset validation, TrainConfig training = {});

}  // namespace betashap
