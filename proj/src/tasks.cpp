#include "betashap/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "betashap/error.hpp"
#include "betashap/parallel.hpp"
#include "betashap/rng.hpp"

namespace betashap {

namespace {

std::vector<double> values_by_row(const Dataset& data, const ValueVector& values) {
  if (values.ids.size() != values.values.size()) {
    throw Error(ErrorKind::invalid_parameter, "value vector ids and values differ in length");
  }
  std::unordered_map<PointId, double> lookup;
  for (std::size_t i = 0; i < values.size(); ++i) lookup.emplace(values.ids[i], values.values[i]);
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto it = lookup.find(data.id(i));
    if (it == lookup.end()) {
      throw Error(ErrorKind::schema_mismatch, "no value for point id " + std::to_string(data.id(i)));
    }
    out[i] = it->second;
  }
  return out;
}

UtilitySpec with_validation(const UtilitySpec& spec, const Dataset& validation) {
  UtilitySpec out = spec;
  out.validation = validation;
  return out;
}

}  // namespace

TwoMeans two_means_1d(std::span<const double> values) {
  TwoMeans out;
  out.in_low.assign(values.size(), false);
  if (values.empty()) {
    out.degenerate = true;
    return out;
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.low_center = *lo;
  out.high_center = *hi;
  if (*lo == *hi) {
    out.degenerate = true;
    return out;
  }
  std::vector<signed char> assignment(values.size(), -1);
  constexpr int kMaxIterations = 1000;
  while (out.iterations < kMaxIterations) {
    ++out.iterations;
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const signed char low =
          std::fabs(values[i] - out.low_center) <= std::fabs(values[i] - out.high_center) ? 1 : 0;
      if (assignment[i] != low) {
        assignment[i] = low;
        changed = true;
      }
    }
    if (!changed) break;
    double sum_low = 0.0;
    double sum_high = 0.0;
    std::size_t n_low = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (assignment[i] == 1) {
        sum_low += values[i];
        ++n_low;
      } else {
        sum_high += values[i];
      }
    }
    const std::size_t n_high = values.size() - n_low;
    if (n_low > 0) out.low_center = sum_low / static_cast<double>(n_low);
    if (n_high > 0) out.high_center = sum_high / static_cast<double>(n_high);
  }
  for (std::size_t i = 0; i < values.size(); ++i) out.in_low[i] = assignment[i] == 1;
  return out;
}

SelectionScore score_selection(std::span<const PointId> selected, std::span<const PointId> flipped) {
  const std::set<PointId> truth(flipped.begin(), flipped.end());
  const std::set<PointId> chosen(selected.begin(), selected.end());
  std::size_t hits = 0;
  for (PointId id : chosen) hits += truth.count(id);
  SelectionScore s;
  if (!chosen.empty()) s.precision = static_cast<double>(hits) / static_cast<double>(chosen.size());
  if (!truth.empty()) s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

DetectionResult detect_noisy(const ValueVector& values, const NoiseRecord& record) {
  if (values.size() < 2) throw Error(ErrorKind::invalid_parameter, "detection needs n >= 2");
  DetectionResult out;
  const TwoMeans clusters = two_means_1d(values.values);
  out.low_center = clusters.low_center;
  out.high_center = clusters.high_center;
  out.degenerate = clusters.degenerate;
  if (!clusters.degenerate) {
    out.threshold = clusters.low_center;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values.values[i] <= out.threshold) out.selected.push_back(values.ids[i]);
    }
    std::sort(out.selected.begin(), out.selected.end());
  } else {
    out.threshold = clusters.low_center;
  }
  out.score = score_selection(out.selected, record.flipped_ids);
  return out;
}

namespace {

SubsampleResult subsample_with(const Dataset& data, std::vector<double> importance,
                               const UtilitySpec& spec, const Dataset& test, double keep,
                               std::uint64_t seed) {
  if (!(keep > 0.0) || !(keep <= 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "keep fraction must lie in (0, 1]");
  }
  validate_spec(spec, data);
  const double top = *std::max_element(importance.begin(), importance.end());
  if (!(top > 0.0)) {
    throw Error(ErrorKind::insufficient_data, "subsampling needs at least one positive value");
  }
  // Inclusion probabilities and inverse weights are scale free; fixing the
  // largest importance at one makes constant importances exactly uniform.
  std::size_t positive = 0;
  for (double& lambda : importance) {
    lambda /= top;
    if (lambda > 0.0) ++positive;
  }

  SubsampleResult out;
  out.keep_fraction = keep;
  std::size_t want = static_cast<std::size_t>(std::floor(keep * static_cast<double>(data.size()) + 0.5));
  want = std::max<std::size_t>(want, 1);
  if (positive < want) {
    out.insufficient_positive_values = true;
    want = positive;
  }

  Rng rng(derive_seed(seed, "subsample"));
  std::vector<bool> taken(data.size(), false);
  std::vector<std::size_t> rows;
  for (std::size_t draw = 0; draw < want; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!taken[i]) total += importance[i];
    }
    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    std::size_t pick = data.size();
    std::size_t last_positive = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (taken[i] || importance[i] == 0.0) continue;
      last_positive = i;
      cumulative += importance[i];
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    if (pick == data.size()) pick = last_positive;
    taken[pick] = true;
    rows.push_back(pick);
  }

  std::vector<double> weights;
  double mass = 0.0;
  for (std::size_t i : rows) {
    weights.push_back(1.0 / importance[i]);
    mass += weights.back();
  }
  const double rescale = static_cast<double>(rows.size()) / mass;
  for (double& w : weights) w *= rescale;

  // Rows in ascending order keep the fit independent of draw order.
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a] < rows[b]; });
  std::vector<std::size_t> sorted_rows;
  std::vector<double> sorted_weights;
  for (std::size_t k : order) {
    sorted_rows.push_back(rows[k]);
    sorted_weights.push_back(weights[k]);
  }

  out.accuracy = score_rows(with_validation(spec, test), data, sorted_rows, sorted_weights);
  for (std::size_t i : rows) out.sampled_ids.push_back(data.id(i));
  out.train_weights = std::move(weights);
  return out;
}

}  // namespace

SubsampleResult subsample_train_eval(const Dataset& data, const ValueVector& values,
                                     const UtilitySpec& spec, const Dataset& test,
                                     double keep_fraction, std::uint64_t seed) {
  auto importance = values_by_row(data, values);
  for (double& v : importance) v = std::max(v, 0.0);
  return subsample_with(data, std::move(importance), spec, test, keep_fraction, seed);
}

SubsampleResult subsample_uniform(const Dataset& data, const UtilitySpec& spec, const Dataset& test,
                                  double keep_fraction, std::uint64_t seed) {
  return subsample_with(data, std::vector<double>(data.size(), 1.0), spec, test, keep_fraction, seed);
}

std::string_view to_string(CurveDirection d) noexcept {
  return d == CurveDirection::add ? "add" : "remove";
}

std::string_view to_string(CurveOrder o) noexcept {
  return o == CurveOrder::by_value ? "value" : "random";
}

CurveResult point_curve(const Game& game, std::span<const PointId> ids,
                        std::span<const double> values, const CurveOptions& options) {
  const std::size_t n = game.size();
  if (ids.size() != n || values.size() != n) {
    throw Error(ErrorKind::invalid_parameter, "curve ids and values must match the game size");
  }
  CurveResult out;
  out.direction = options.direction;
  out.order = options.order;

  Coalition member(n);
  if (options.direction == CurveDirection::remove) {
    for (std::size_t i = 0; i < n; ++i) member.insert(i);
  } else {
    if (options.initial_size > n) {
      throw Error(ErrorKind::invalid_parameter, "initial set larger than the dataset");
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Rng rng(derive_seed(options.seed, "curve-initial"));
    partial_shuffle(rng, pool, options.initial_size);
    for (std::size_t s = 0; s < options.initial_size; ++s) member.insert(pool[s]);
    for (std::size_t i : member.members()) out.initial_set.push_back(ids[i]);
    std::sort(out.initial_set.begin(), out.initial_set.end());
  }

  // Candidates: everything for removal, the points outside the initial set
  // for addition.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (options.direction == CurveDirection::remove || !member.contains(i)) order.push_back(i);
  }
  if (options.order == CurveOrder::by_value) {
    const bool ascending = options.direction == CurveDirection::remove;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return ascending ? values[a] < values[b] : values[a] > values[b];
      return ids[a] < ids[b];
    });
  } else {
    Rng rng(derive_seed(options.seed, "curve-order"));
    partial_shuffle(rng, order, order.size());
  }

  const std::size_t steps = options.steps == 0 ? n / 2 : options.steps;
  if (steps > order.size()) throw Error(ErrorKind::invalid_parameter, "more curve steps than points");

  out.utility.push_back(game.value(member));
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t i = order[k];
    if (options.direction == CurveDirection::add) {
      member.insert(i);
    } else {
      member.erase(i);
    }
    out.sequence.push_back(ids[i]);
    out.utility.push_back(game.value(member));
    out.relative_area += out.utility.back() - out.utility.front();
  }
  return out;
}

CurveResult point_curve(const Dataset& data, const ValueVector& values, const UtilitySpec& spec,
                        const CurveOptions& options) {
  const auto v = values_by_row(data, values);
  DataUtility game(data, spec);
  return point_curve(game, data.ids(), v, options);
}

UtilitySpec default_spec_for(SyntheticKind kind, Dataset validation, TrainConfig training) {
  UtilitySpec spec;
  if (is_classification(kind)) {
    spec.model = ModelKind::logistic_regression;
    spec.metric = Metric::accuracy;
  } else {
    spec.model = ModelKind::linear_regression;
    spec.metric = Metric::negative_mse;
  }
  spec.validation = std::move(validation);
  spec.training = training;
  return spec;
}

SnrProfile snr_scan(const SnrOptions& options) {
  const Dataset validation =
      generate(options.kind, options.validation_size == 0 ? options.n : options.validation_size,
               derive_seed(options.seed, "snr-validation"));
  const UtilitySpec spec = default_spec_for(options.kind, validation, options.training);
  return snr_scan(options, [spec](const Dataset& train, std::span<const std::size_t> rows) {
    return score_rows(spec, train, rows);
  });
}

SnrProfile snr_scan(const SnrOptions& options, const ScoreFn& score) {
  const std::size_t n = options.n;
  if (n < 2) throw Error(ErrorKind::invalid_parameter, "snr scan needs n >= 2");
  if (options.repeats < 2) throw Error(ErrorKind::invalid_parameter, "snr scan needs >= 2 repeats");
  if (options.samples < 1) throw Error(ErrorKind::invalid_parameter, "snr scan needs >= 1 sample");
  if (options.grid.empty()) throw Error(ErrorKind::invalid_parameter, "empty cardinality grid");
  for (std::size_t j : options.grid) {
    if (j < 1 || j > n) throw Error(ErrorKind::invalid_parameter, "grid cardinality outside [1, n]");
  }

  // Cardinality 2 is always scanned; it supplies the zeta reference.
  std::vector<std::size_t> cards = options.grid;
  if (std::find(cards.begin(), cards.end(), std::size_t{2}) == cards.end()) cards.push_back(2);
  const std::size_t c_count = cards.size();

  // A classification target carries the more likely label under the link, so
  // that "clean" and "flipped" are unambiguous.
  Dataset target = generate(options.kind, 1, derive_seed(options.seed, "snr-target"));
  if (is_classification(options.kind)) {
    const auto beta = classification_coefficients(options.kind);
    double eta = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) eta += beta[k] * target.row(0)[k];
    const double clean = eta >= 0.0 ? 1.0 : 0.0;
    target = target.with_labels({options.flip_target ? 1.0 - clean : clean});
  } else if (options.flip_target) {
    throw Error(ErrorKind::invalid_parameter, "flip_target needs a classification kind");
  }

  // diffs[r][c] holds the `samples` summands for repeat r and cardinality c.
  std::vector<std::vector<std::vector<double>>> diffs(
      options.repeats, std::vector<std::vector<double>>(c_count));

  const std::uint64_t background_seed = derive_seed(options.seed, "snr-background");
  parallel_for(options.repeats, options.threads, [&](std::size_t r) {
    Dataset background = generate(options.kind, n - 1, derive_seed(background_seed, {r}));
    if (options.background_flip > 0.0) {
      background = flip_labels(background, options.background_flip, derive_seed(background_seed, {r, 1})).first;
    }
    const std::size_t d = background.dim();
    std::vector<double> features(background.features().begin(), background.features().end());
    features.insert(features.end(), target.row(0).begin(), target.row(0).end());
    std::vector<double> labels(background.labels().begin(), background.labels().end());
    labels.push_back(target.label(0));
    const Dataset train = Dataset::with_row_ids(d, std::move(features), std::move(labels),
                                                background.label_kind());

    std::vector<std::size_t> pool(n - 1);
    std::vector<std::size_t> rows;
    for (std::size_t c = 0; c < c_count; ++c) {
      const std::size_t j = cards[c];
      auto& out = diffs[r][c];
      out.reserve(options.samples);
      for (std::size_t s = 0; s < options.samples; ++s) {
        Rng rng(derive_seed(options.seed, {r, j, s}));
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        partial_shuffle(rng, pool, j - 1);
        rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(j - 1));
        std::sort(rows.begin(), rows.end());
        const double without = score(train, rows);
        rows.push_back(n - 1);
        const double with = score(train, rows);
        out.push_back(with - without);
      }
    }
  });

  SnrProfile profile;
  profile.options = options;
  profile.target_label = target.label(0);
  profile.estimates.assign(options.repeats, std::vector<double>(options.grid.size()));

  std::vector<double> zeta(c_count, 0.0);
  std::vector<SnrRow> rows(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    std::vector<double> per_repeat(options.repeats);
    for (std::size_t r = 0; r < options.repeats; ++r) {
      double sum = 0.0;
      for (double x : diffs[r][c]) {
        sum += x;
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
      }
      per_repeat[r] = sum / static_cast<double>(options.samples);
    }
    zeta[c] = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;

    double avg = 0.0;
    for (double e : per_repeat) avg += e;
    avg /= static_cast<double>(options.repeats);
    double ss = 0.0;
    for (double e : per_repeat) ss += (e - avg) * (e - avg);
    SnrRow& row = rows[c];
    row.j = cards[c];
    row.mean = avg;
    row.std = std::sqrt(ss / static_cast<double>(options.repeats - 1));
    if (row.std > 0.0) row.snr = std::fabs(avg) / row.std;
    row.zeta = zeta[c];
    if (c < options.grid.size()) {
      for (std::size_t r = 0; r < options.repeats; ++r) profile.estimates[r][c] = per_repeat[r];
    }
  }
  const auto ref = static_cast<std::size_t>(
      std::find(cards.begin(), cards.end(), std::size_t{2}) - cards.begin());
  profile.zeta_reference = zeta[ref];
  for (std::size_t c = 0; c < options.grid.size(); ++c) {
    SnrRow row = rows[c];
    if (row.j >= 2 && profile.zeta_reference > 0.0) {
      row.zeta_ratio = row.zeta / (static_cast<double>(row.j - 1) * profile.zeta_reference);
    }
    profile.rows.push_back(row);
  }
  return profile;
}

}  // namespace betashap
