#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "betashap/error.hpp"
#include "betashap/exact.hpp"
#include "betashap/synthetic.hpp"
#include "betashap/tasks.hpp"

using namespace betashap;

namespace {

ValueVector make_values(std::vector<double> v) {
  ValueVector out;
  out.values = std::move(v);
  out.ids = default_ids(out.values.size());
  return out;
}

NoiseRecord record_of(std::vector<PointId> ids, double fraction = 0.1) {
  NoiseRecord r;
  r.flipped_ids = std::move(ids);
  r.fraction = fraction;
  return r;
}

}  // namespace

TEST_CASE("perfectly separated values are detected exactly") {
  const auto values = make_values({-1, -1, -1, 5, 5, 5, 5, 5, 5, 5});
  const auto res = detect_noisy(values, record_of({0, 1, 2}));
  CHECK(res.selected == std::vector<PointId>{0, 1, 2});
  CHECK(res.low_center == -1.0);
  CHECK(res.high_center == 5.0);
  CHECK(res.threshold == -1.0);
  CHECK(res.score.f1 == 1.0);
}

TEST_CASE("precision, recall and F1 by hand") {
  const std::vector<PointId> selected{1, 2, 3};
  const std::vector<PointId> flipped{2, 3, 4};
  const auto s = score_selection(selected, flipped);
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  const auto none = score_selection({}, flipped);
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
}

TEST_CASE("F1 is bounded and equals 1 exactly on identical sets") {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PointId> a;
    std::vector<PointId> b;
    for (PointId i = 0; i < 12; ++i) {
      if (gen() % 3 == 0) a.push_back(i);
      if (gen() % 3 == 0) b.push_back(i);
    }
    const auto s = score_selection(a, b);
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 1.0);
    CHECK((s.f1 == 1.0) == (a == b && !a.empty()));
    if (s.precision + s.recall > 0)
      CHECK(s.f1 == doctest::Approx(2 * s.precision * s.recall / (s.precision + s.recall)));
  }
}

TEST_CASE("two-means reaches a Lloyd fixed point") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(40);
    for (double& x : v) x = nd(gen) + (gen() % 4 == 0 ? -3.0 : 0.0);
    const auto tm = two_means_1d(v);
    REQUIRE_FALSE(tm.degenerate);
    double lo = 0, hi = 0;
    int nlo = 0, nhi = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool closer_low = std::fabs(v[i] - tm.low_center) <= std::fabs(v[i] - tm.high_center);
      CHECK(tm.in_low[i] == closer_low);
      if (tm.in_low[i]) {
        lo += v[i];
        ++nlo;
      } else {
        hi += v[i];
        ++nhi;
      }
    }
    CHECK(tm.low_center == doctest::Approx(lo / nlo));
    CHECK(tm.high_center == doctest::Approx(hi / nhi));
    CHECK(tm.low_center < tm.high_center);
  }
}

TEST_CASE("detection is invariant under positive affine maps") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(60);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = nd(gen) - (i < 8 ? 2.5 : 0.0);
    const auto base = detect_noisy(make_values(v), record_of({0, 1, 2, 3, 4, 5, 6, 7}));
    for (auto [a, b] : std::vector<std::pair<double, double>>{{2.0, 0.0}, {0.5, -3.0}, {1000.0, 7.0}}) {
      std::vector<double> w(v);
      for (double& x : w) x = a * x + b;
      const auto moved = detect_noisy(make_values(w), record_of({0, 1, 2, 3, 4, 5, 6, 7}));
      CHECK(moved.selected == base.selected);
      CHECK(moved.score.f1 == base.score.f1);
    }
  }
}

TEST_CASE("all-equal values select nothing") {
  const auto res = detect_noisy(make_values(std::vector<double>(6, 0.25)), record_of({1}));
  CHECK(res.degenerate);
  CHECK(res.selected.empty());
  CHECK(res.score.f1 == 0.0);
  CHECK_THROWS_AS(detect_noisy(make_values({1.0}), record_of({})), Error);
}

TEST_CASE("subsampling with constant importance equals uniform subsampling") {
  const auto data = gen_gaussian_classification(80, 1);
  const auto val = gen_gaussian_classification(40, 2);
  const auto test = gen_gaussian_classification(300, 3);
  const auto spec = default_spec_for(SyntheticKind::gaussian_classification, val);
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto weighted = subsample_train_eval(data, make_values(std::vector<double>(80, 0.37)), spec, test, 0.25, seed);
    const auto uniform = subsample_uniform(data, spec, test, 0.25, seed);
    CHECK(weighted.sampled_ids == uniform.sampled_ids);
    CHECK(weighted.train_weights == uniform.train_weights);
    CHECK(weighted.accuracy == uniform.accuracy);
    CHECK(weighted.sampled_ids.size() == 20);
  }
}

TEST_CASE("subsampling never draws non-positive values") {
  const auto data = gen_gaussian_classification(40, 4);
  const auto test = gen_gaussian_classification(100, 5);
  const auto spec = default_spec_for(SyntheticKind::gaussian_classification, test);
  std::vector<double> v(40);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 == 0) ? 0.1 + 0.01 * i : -0.5;
  const auto res = subsample_train_eval(data, make_values(v), spec, test, 0.25, 9);
  CHECK(res.sampled_ids.size() == 10);
  std::set<PointId> unique(res.sampled_ids.begin(), res.sampled_ids.end());
  CHECK(unique.size() == 10);
  for (PointId id : res.sampled_ids) CHECK(id % 2 == 0);
  const double mean = std::accumulate(res.train_weights.begin(), res.train_weights.end(), 0.0) / 10.0;
  CHECK(mean == doctest::Approx(1.0));
  CHECK_FALSE(res.insufficient_positive_values);

  std::vector<double> few(40, 0.0);
  for (std::size_t i = 0; i < 5; ++i) few[i] = 1.0 + i;
  const auto flagged = subsample_train_eval(data, make_values(few), spec, test, 0.25, 9);
  CHECK(flagged.insufficient_positive_values);
  CHECK(flagged.sampled_ids.size() == 5);
  CHECK_THROWS_AS(subsample_train_eval(data, make_values(std::vector<double>(40, -1.0)), spec, test, 0.25, 9), Error);
}

TEST_CASE("removal curve on a pure size game") {
  FunctionGame size_game(20, [](const Coalition& c) { return std::sqrt(static_cast<double>(c.count())); });
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 0.0);
  const auto ids = default_ids(20);
  const auto res = point_curve(size_game, ids, v, CurveOptions{});
  REQUIRE(res.utility.size() == 11);
  for (std::size_t k = 1; k < res.utility.size(); ++k) CHECK(res.utility[k] < res.utility[k - 1]);
  CHECK(res.relative_area < 0.0);
  CHECK(res.utility[0] == std::sqrt(20.0));
  std::vector<PointId> expect(10);
  std::iota(expect.begin(), expect.end(), PointId{0});
  CHECK(res.sequence == expect);
}

TEST_CASE("curve ordering: ties by id, additions skip the initial set") {
  FunctionGame size_game(12, [](const Coalition& c) { return static_cast<double>(c.count()); });
  const std::vector<double> equal(12, 1.0);
  const auto ids = default_ids(12);
  CurveOptions rm;
  rm.steps = 5;
  CHECK(point_curve(size_game, ids, equal, rm).sequence == std::vector<PointId>{0, 1, 2, 3, 4});
  CurveOptions add;
  add.direction = CurveDirection::add;
  add.initial_size = 4;
  add.steps = 8;
  add.seed = 5;
  const auto res = point_curve(size_game, ids, equal, add);
  CHECK(res.initial_set.size() == 4);
  std::vector<PointId> all(res.initial_set);
  all.insert(all.end(), res.sequence.begin(), res.sequence.end());
  std::sort(all.begin(), all.end());
  CHECK(all == ids);
  for (std::size_t k = 0; k < res.utility.size(); ++k) CHECK(res.utility[k] == 4.0 + k);
  for (std::size_t k = 1; k < res.sequence.size(); ++k) CHECK(res.sequence[k - 1] < res.sequence[k]);
  add.steps = 9;
  CHECK_THROWS_AS(point_curve(size_game, ids, equal, add), Error);
}

TEST_CASE("zero-step curve has zero area") {
  FunctionGame game(6, [](const Coalition& c) { return 0.3 * c.count(); });
  CurveOptions o;
  o.steps = 0;
  const std::vector<double> v{3, 1, 2, 6, 5, 4};
  // steps = 0 means n/2; an explicit empty perturbation uses a one-point game.
  FunctionGame one(1, [](const Coalition& c) { return 1.0 + c.count(); });
  const auto res = point_curve(one, default_ids(1), std::vector<double>{0.0}, o);
  CHECK(res.utility.size() == 1);
  CHECK(res.relative_area == 0.0);
  CHECK(point_curve(game, default_ids(6), v, o).sequence == std::vector<PointId>{1, 2, 0});
}

TEST_CASE("removing low-value points first beats random removal on an exact-value game") {
  auto train = gen_gaussian_classification(16, 31);
  const auto [noisy, rec] = flip_labels(train, 0.25, 31);
  const auto val = gen_gaussian_classification(100, 32);
  const auto spec = default_spec_for(SyntheticKind::gaussian_classification, val);
  const auto values = semivalue_exact(noisy, spec, make_beta_scheme(16, 1, 1));

  CurveOptions by_value;
  const auto ordered = point_curve(noisy, values, spec, by_value);
  double random_area = 0.0;
  CurveOptions random;
  random.order = CurveOrder::random;
  for (std::uint64_t s = 0; s < 50; ++s) {
    random.seed = s;
    random_area += point_curve(noisy, values, spec, random).relative_area;
  }
  CHECK(ordered.relative_area >= random_area / 50.0);
}

TEST_CASE("snr scan with a constant utility reports missing snr") {
  SnrOptions o;
  o.n = 30;
  o.grid = {2, 10, 25};
  o.repeats = 4;
  o.samples = 5;
  const auto p = snr_scan(o, [](const Dataset&, std::span<const std::size_t>) { return 0.5; });
  REQUIRE(p.rows.size() == 3);
  for (const auto& row : p.rows) {
    CHECK(row.mean == 0.0);
    CHECK(row.std == 0.0);
    CHECK_FALSE(row.snr.has_value());
  }
  CHECK(p.estimates.size() == 4);
}

TEST_CASE("snr scan is deterministic and thread invariant") {
  SnrOptions o;
  o.n = 60;
  o.grid = {2, 30};
  o.repeats = 4;
  o.samples = 5;
  o.seed = 3;
  const auto a = snr_scan(o);
  o.threads = 3;
  const auto b = snr_scan(o);
  CHECK(a.estimates == b.estimates);
  CHECK(a.target_label == b.target_label);
  CHECK_THROWS_AS(snr_scan(SnrOptions{SyntheticKind::snr_classification, 60, {2, 61}, 2, 2}), Error);
  CHECK_THROWS_AS(snr_scan(SnrOptions{SyntheticKind::snr_classification, 60, {2}, 1, 2}), Error);
}

TEST_CASE("snr decreases with cardinality and the clean-flipped gap closes") {
  SnrOptions o;
  o.n = 100;
  o.grid = {2, 75};
  o.repeats = 12;
  o.samples = 20;
  double gap_small = 0.0;
  double gap_large = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    o.seed = seed;
    o.flip_target = false;
    const auto clean = snr_scan(o);
    REQUIRE(clean.rows[0].snr.has_value());
    REQUIRE(clean.rows[1].snr.has_value());
    CHECK(*clean.rows[0].snr > *clean.rows[1].snr);
    o.flip_target = true;
    const auto flipped = snr_scan(o);
    CHECK(flipped.target_label == 1.0 - clean.target_label);
    gap_small += clean.rows[0].mean - flipped.rows[0].mean;
    gap_large += clean.rows[1].mean - flipped.rows[1].mean;
  }
  CHECK(gap_small > gap_large);
}
