#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "betashap/error.hpp"
#include "betashap/exact.hpp"
#include "betashap/mc.hpp"
#include "betashap/rng.hpp"
#include "betashap/synthetic.hpp"
#include "support/oracles.hpp"

using namespace betashap;

namespace {

// Random interactions on top of an additive part with well separated values.
std::vector<double> separated_game(std::uint64_t seed) {
  auto t = oracle::random_table(8, seed);
  for (std::uint64_t m = 0; m < t.size(); ++m) {
    t[m] *= 0.25;
    for (int i = 0; i < 8; ++i)
      if ((m >> i) & 1u) t[m] += 0.5 * i;
  }
  return t;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const double n = static_cast<double>(a.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

ChainState state(double mean, double variance, std::uint64_t count) {
  return ChainState{mean, variance * static_cast<double>(count - 1), count};
}

McConfig fixed_length(std::size_t iterations, std::uint64_t seed, std::size_t chains = 2) {
  McConfig c;
  c.chains = chains;
  c.min_iterations = iterations;
  c.max_iterations = iterations;
  c.check_every = iterations;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("gelman_rubin degenerate chains return 1") {
  std::vector<ChainState> chains(4);
  for (auto& c : chains)
    for (int i = 0; i < 50; ++i) c.push(2.5);
  CHECK(gelman_rubin(chains) == 1.0);
}

TEST_CASE("gelman_rubin with equal means and variances") {
  const std::uint64_t b = 10000;
  std::vector<ChainState> chains{state(0.3, 1.7, b), state(0.3, 1.7, b)};
  CHECK(gelman_rubin(chains) == doctest::Approx(std::sqrt((b - 1.0) / b)).epsilon(1e-14));
  CHECK(gelman_rubin(chains) < 1.0);
}

TEST_CASE("gelman_rubin on draws from one distribution approaches 1") {
  std::vector<ChainState> chains(10);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    Rng rng(derive_seed(2024, {c}));
    for (int i = 0; i < 100000; ++i) chains[c].push(rng.normal());
  }
  CHECK(std::fabs(gelman_rubin(chains) - 1.0) < 0.01);
}

TEST_CASE("gelman_rubin edge cases") {
  std::vector<ChainState> split{state(0.0, 0.0, 20), state(1.0, 0.0, 20)};
  CHECK(gelman_rubin(split) == std::numeric_limits<double>::infinity());
  std::vector<ChainState> short_chain{state(0.0, 1.0, 20), ChainState{}};
  short_chain[1].push(1.0);
  CHECK_THROWS_AS(gelman_rubin(short_chain), Error);
  std::vector<ChainState> one{state(0.0, 1.0, 20)};
  CHECK_THROWS_AS(gelman_rubin(one), Error);
}

TEST_CASE("ChainState matches a replay of its increments") {
  Rng rng(5);
  std::vector<double> log;
  ChainState s;
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.normal() * 3.0 + 1.0;
    log.push_back(x);
    s.push(x);
  }
  const double mean = std::accumulate(log.begin(), log.end(), 0.0) / log.size();
  double ss = 0.0;
  for (double x : log) ss += (x - mean) * (x - mean);
  CHECK(s.count == log.size());
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.variance() == doctest::Approx(ss / (log.size() - 1)).epsilon(1e-12));
}

TEST_CASE("configuration validation") {
  TableGame game(oracle::random_table(4, 1));
  const auto scheme = make_beta_scheme(4, 1, 1);
  auto rejects = [&](McConfig c) {
    try {
      mc_estimate(game, scheme, c);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::invalid_parameter;
    }
    return false;
  };
  McConfig c;
  c.chains = 1;
  CHECK(rejects(c));
  c = McConfig{};
  c.rho = 1.0;
  CHECK(rejects(c));
  c = McConfig{};
  c.min_iterations = 1;
  CHECK(rejects(c));
  c = McConfig{};
  c.max_iterations = 50;
  CHECK(rejects(c));
  CHECK_THROWS_AS(mc_estimate(game, make_beta_scheme(5, 1, 1), McConfig{}), Error);
}

TEST_CASE("constant utility gives exact zeros and converges at the first check") {
  FunctionGame game(9, [](const Coalition&) { return 0.7; });
  McConfig c;
  const auto r = mc_estimate(game, make_beta_scheme(9, 16, 1), c);
  for (double v : r.values.values) CHECK(v == 0.0);
  for (double v : r.rhat) CHECK(v == 1.0);
  for (double v : r.standard_error) CHECK(v == 0.0);
  CHECK(r.terminated_by == Termination::converged);
  CHECK(r.iterations_per_chain == c.min_iterations);
}

TEST_CASE("n = 8 game: agreement with the exact engine") {
  const auto table = separated_game(0);
  TableGame game(table);
  const auto scheme = make_beta_scheme(8, 1, 1);
  const auto exact = semivalue_exact(game, scheme);

  McConfig c;
  c.seed = 0;
  const auto r = mc_estimate(game, scheme, c);
  CHECK(r.terminated_by == Termination::converged);
  for (double rh : r.rhat) CHECK(rh < c.rho);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::fabs(r.values.values[i] - exact.values[i]) <= 3.0 * r.standard_error[i]);
  }
  CHECK(spearman(r.values.values, exact.values) >= 0.99);

  // Across seeds the 3-SE band is a confidence statement, not a certainty.
  int within = 0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    c.seed = static_cast<std::uint64_t>(s);
    const auto rs = mc_estimate(game, scheme, c);
    bool ok = true;
    for (std::size_t i = 0; i < 8; ++i)
      ok = ok && std::fabs(rs.values.values[i] - exact.values[i]) <= 3.0 * rs.standard_error[i];
    within += ok ? 1 : 0;
    CHECK(spearman(rs.values.values, exact.values) >= 0.99);
  }
  CHECK(within >= 16);
}

TEST_CASE("same seed gives a bit-identical report; thread count does not matter") {
  TableGame game(oracle::random_table(10, 3));
  const auto scheme = make_beta_scheme(10, 4, 1);
  McConfig c;
  c.seed = 77;
  const auto a = mc_estimate(game, scheme, c);
  const auto b = mc_estimate(game, scheme, c);
  c.threads = 4;
  const auto p = mc_estimate(game, scheme, c);
  for (const auto* other : {&b, &p}) {
    CHECK(a.values.values == other->values.values);
    CHECK(a.rhat == other->rhat);
    CHECK(a.standard_error == other->standard_error);
    CHECK(a.iterations_per_chain == other->iterations_per_chain);
    CHECK(a.utility_queries == other->utility_queries);
    CHECK(a.terminated_by == other->terminated_by);
  }
  c.seed = 78;
  c.threads = 1;
  CHECK(mc_estimate(game, scheme, c).values.values != a.values.values);
}

TEST_CASE("Beta(1,1) and an explicit all-ones weight vector draw identically") {
  TableGame game(oracle::random_table(8, 4));
  McConfig c;
  c.seed = 9;
  const auto beta = mc_estimate(game, make_beta_scheme(8, 1, 1), c);
  const auto ones = mc_estimate(game, make_explicit_normalized_scheme(std::vector<double>(8, 1.0)), c);
  CHECK(beta.values.values == ones.values.values);
  CHECK(beta.rhat == ones.rhat);
  CHECK(beta.utility_queries == ones.utility_queries);
}

TEST_CASE("zero-weight cardinalities issue no utility queries") {
  TableGame game(oracle::random_table(6, 2));
  const auto r = mc_estimate(game, make_scheme(6, SchemeOrigin::loo_last), fixed_length(600, 1));
  const std::uint64_t draws = 6 * 2 * 600;
  CHECK(r.utility_queries > 0);
  CHECK(r.utility_queries < draws);  // only k = n draws are evaluated
  CHECK(r.utility_queries % 2 == 0);
  const auto dense = mc_estimate(game, make_beta_scheme(6, 1, 1), fixed_length(600, 1));
  CHECK(dense.utility_queries == 2 * draws);
}

TEST_CASE("unbiasedness over repeated runs") {
  const auto table = oracle::random_table(8, 13);
  TableGame game(table);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {16, 1}}) {
    const auto scheme = make_beta_scheme(8, a, b);
    const auto exact = semivalue_exact(game, scheme);
    const int runs = 200;
    std::vector<ChainState> per_point(8);
    for (int r = 0; r < runs; ++r) {
      const auto rep = mc_estimate(game, scheme, fixed_length(500, 1000 + r));
      for (std::size_t i = 0; i < 8; ++i) per_point[i].push(rep.values.values[i]);
    }
    for (std::size_t i = 0; i < 8; ++i) {
      const double se = std::sqrt(per_point[i].variance() / runs);
      CHECK(std::fabs(per_point[i].mean - exact.values[i]) <= 4.0 * se);
    }
  }
}

TEST_CASE("doubling the iteration budget does not increase the average worst error") {
  TableGame game(oracle::random_table(8, 21));
  const auto scheme = make_beta_scheme(8, 4, 1);
  const auto exact = semivalue_exact(game, scheme);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t iters : {200, 400, 800, 1600, 3200}) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto r = mc_estimate(game, scheme, fixed_length(iters, s));
      double worst = 0.0;
      for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::fabs(r.values.values[i] - exact.values[i]));
      total += worst;
    }
    const double avg = total / 20.0;
    CHECK(avg <= previous);
    previous = avg;
  }
}

TEST_CASE("data-backed estimate") {
  const auto train = gen_gaussian_classification(12, 4);
  const auto val = gen_gaussian_classification(50, 5);
  UtilitySpec spec{ModelKind::logistic_regression, Metric::accuracy, val, {}};
  McConfig c;
  c.max_iterations = 300;
  c.seed = 3;
  const auto r = mc_estimate(train, spec, make_beta_scheme(12, 16, 1), c);
  CHECK(r.values.size() == 12);
  CHECK(r.values.mode == ValuationMode::mc);
  CHECK(std::equal(r.values.ids.begin(), r.values.ids.end(), train.ids().begin(), train.ids().end()));
  for (double v : r.values.values) CHECK(std::isfinite(v));
  CHECK(r.iterations_per_chain <= 300);
  if (r.terminated_by == Termination::converged) {
    for (double rh : r.rhat) CHECK(rh < c.rho);
  }
}
