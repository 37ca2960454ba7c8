#include <doctest.h>

#include <cmath>
#include <vector>

#include "betashap/error.hpp"
#include "betashap/serialize.hpp"
#include "betashap/weights.hpp"
#include "../support/oracles.hpp"

using namespace betashap;

namespace {

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

double normalized_sum(const WeightScheme& s) {
  long double total = 0.0L;
  for (double w : s.normalized()) total += w;
  return static_cast<double>(total);
}

std::vector<std::size_t> scan_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 2; n <= 200; ++n) sizes.push_back(n);
  for (std::size_t n = 237; n < 5000; n += 263) sizes.push_back(n);
  sizes.push_back(5000);
  return sizes;
}

}  // namespace

TEST_CASE("beta_weight on the two-point uniform case") {
  CHECK(beta_weight(2, 1, {1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta_weight(2, 2, {1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("beta_weight(200, 1, Beta(16,1)) matches the log-gamma identity") {
  // Exact value: 200 * 16 / 215 = 640/43.
  const double v = beta_weight(200, 1, {16, 1});
  CHECK(rel_diff(v, 640.0 / 43.0) < 1e-12);
  CHECK(rel_diff(v, oracle::lgamma_beta_weight(200, 1, 16, 1)) < 1e-10);
  // Stratum j = 1 has a single subset, so w~(1) = w(1) is the largest weight.
  const auto scheme = make_beta_scheme(200, 16, 1);
  CHECK(rel_diff(scheme.normalized(1), v) < 1e-12);
  CHECK(argmax_cardinality(scheme) == 1);
}

TEST_CASE("beta_weight agrees with log-gamma oracle across a grid") {
  for (std::size_t n : {3u, 17u, 200u, 1000u}) {
    for (double a : {0.5, 1.0, 4.0, 16.0}) {
      for (double b : {0.5, 1.0, 4.0, 16.0}) {
        for (std::size_t j : {std::size_t{1}, n / 2, n}) {
          const double got = beta_weight(n, j, {a, b});
          const double want = oracle::lgamma_beta_weight(n, j, a, b);
          if (want > 1e-280) CHECK(rel_diff(got, want) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("beta_weight stays finite and non-negative up to n = 10^6") {
  const std::size_t n = 1'000'000;
  for (std::size_t j : {std::size_t{1}, std::size_t{2}, n / 2, n - 1, n}) {
    const double w = beta_weight(n, j, {16, 1});
    CHECK(std::isfinite(w));
    CHECK(w >= 0.0);
  }
}

TEST_CASE("log-space weights agree with exact rational arithmetic for n <= 30") {
  using oracle::Rational;
  const std::vector<std::pair<Rational, Rational>> params = {
      {1, 1}, {4, 1}, {1, 4}, {16, 1}, {1, 16}, {4, 16}, {Rational(3, 2), Rational(5, 2)},
      {Rational(1, 2), Rational(1, 2)}};
  for (std::size_t n = 1; n <= 30; ++n) {
    for (const auto& [a, b] : params) {
      const auto scheme = make_beta_scheme(n, static_cast<double>(a), static_cast<double>(b));
      for (std::size_t j = 1; j <= n; ++j) {
        const Rational w = oracle::rational_beta_weight(n, j, a, b);
        const Rational wn = w * oracle::rational_binomial(n - 1, j - 1);
        CHECK(rel_diff(beta_weight(n, j, {static_cast<double>(a), static_cast<double>(b)}),
                       static_cast<double>(w)) < 1e-10);
        CHECK(rel_diff(scheme.raw(j), static_cast<double>(w)) < 1e-10);
        CHECK(rel_diff(scheme.normalized(j), static_cast<double>(wn)) < 1e-10);
      }
    }
  }
}

TEST_CASE("make_scheme special origins") {
  SUBCASE("data shapley is uniform") {
    const auto s = make_scheme(5, SchemeOrigin::data_shapley);
    for (double w : s.normalized()) CHECK(w == 1.0);
    CHECK(s.raw(3) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
  SUBCASE("loo-last puts all mass on j = n") {
    const auto s = make_scheme(3, SchemeOrigin::loo_last);
    CHECK(std::vector<double>(s.normalized().begin(), s.normalized().end()) ==
          std::vector<double>{0.0, 0.0, 3.0});
    CHECK(s.raw(3) == 3.0);
  }
  SUBCASE("loo-first puts all mass on j = 2") {
    const auto s = make_scheme(4, SchemeOrigin::loo_first);
    CHECK(std::vector<double>(s.normalized().begin(), s.normalized().end()) ==
          std::vector<double>{0.0, 4.0, 0.0, 0.0});
    CHECK_THROWS_AS(make_scheme(1, SchemeOrigin::loo_first), Error);
  }
  SUBCASE("beta(4,1) on n = 4 is strictly decreasing") {
    // Direct evaluation of the product form: w~ = (16/7, 8/7, 16/35, 4/35).
    const auto s = make_beta_scheme(4, 4, 1);
    const std::vector<double> want{16.0 / 7, 8.0 / 7, 16.0 / 35, 4.0 / 35};
    for (std::size_t j = 1; j <= 4; ++j) CHECK(rel_diff(s.normalized(j), want[j - 1]) < 1e-13);
    for (std::size_t j = 1; j < 4; ++j) CHECK(s.normalized(j) > s.normalized(j + 1));
  }
}

TEST_CASE("argmax_cardinality") {
  CHECK(argmax_cardinality(make_beta_scheme(200, 16, 1)) == 1);
  CHECK(argmax_cardinality(make_beta_scheme(200, 1, 16)) == 200);
  CHECK(argmax_cardinality(make_beta_scheme(200, 1, 1)) == 1);
  CHECK(argmax_cardinality(make_scheme(7, SchemeOrigin::loo_last)) == 7);
}

TEST_CASE("admissibility holds for the Beta family") {
  for (std::size_t n : scan_sizes()) {
    for (double a : {1.0, 4.0, 16.0}) {
      for (double b : {1.0, 4.0, 16.0}) {
        const auto s = make_beta_scheme(n, a, b);
        const double gap = std::fabs(normalized_sum(s) - static_cast<double>(n)) / static_cast<double>(n);
        CHECK_MESSAGE(gap <= 1e-9, "n=" << n << " a=" << a << " b=" << b);
        for (double w : s.raw()) CHECK_UNARY(w >= 0.0 && std::isfinite(w));
      }
    }
  }
}

TEST_CASE("Beta(1,1) equals the data-shapley scheme") {
  for (std::size_t n : {1u, 2u, 9u, 200u, 5000u}) {
    const auto beta = make_beta_scheme(n, 1, 1);
    const auto ds = make_scheme(n, SchemeOrigin::data_shapley);
    for (std::size_t j = 1; j <= n; ++j) {
      CHECK(std::fabs(beta.normalized(j) - ds.normalized(j)) <= 1e-12);
      CHECK(std::fabs(beta.raw(j) - ds.raw(j)) <= 1e-12 * ds.raw(j));
    }
  }
}

TEST_CASE("monotone weight shapes") {
  for (std::size_t n : {2u, 10u, 200u, 1201u, 5000u}) {
    for (double p : {1.5, 4.0, 16.0}) {
      const auto small_first = make_beta_scheme(n, p, 1);
      const auto large_first = make_beta_scheme(n, 1, p);
      for (std::size_t j = 1; j < n; ++j) {
        CHECK(small_first.normalized(j + 1) <= small_first.normalized(j));
        CHECK(large_first.normalized(j + 1) >= large_first.normalized(j));
      }
    }
  }
}

TEST_CASE("reflection symmetry w~_{a,b}(j) = w~_{b,a}(n+1-j)") {
  for (std::size_t n : {2u, 10u, 200u, 5000u}) {
    for (double a : {1.0, 4.0, 16.0}) {
      for (double b : {1.0, 4.0, 16.0}) {
        const auto s = make_beta_scheme(n, a, b);
        const auto r = make_beta_scheme(n, b, a);
        for (std::size_t j = 1; j <= n; ++j) {
          CHECK(std::fabs(s.normalized(j) - r.normalized(n + 1 - j)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("invalid parameters and admissibility violations") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::io_error;
  };
  CHECK(kind_of([] { beta_weight(5, 1, {0.0, 1.0}); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { beta_weight(5, 1, {1.0, -2.0}); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { beta_weight(5, 0, {1.0, 1.0}); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { beta_weight(5, 6, {1.0, 1.0}); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { make_beta_scheme(0, 1, 1); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { make_explicit_scheme({1.0, 1.0, 1.0}); }) ==
        ErrorKind::admissibility_violation);
  CHECK(kind_of([] { make_explicit_scheme({1.0, NAN}); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("explicit schemes accept signed weights when admissible") {
  const auto s = make_explicit_scheme({3.0, -1.0});
  CHECK(s.normalized(1) == 3.0);
  CHECK(s.normalized(2) == -1.0);
  const auto ones = make_explicit_normalized_scheme(std::vector<double>(6, 1.0));
  for (double w : ones.normalized()) CHECK(w == 1.0);
  CHECK(ones.raw(3) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("scheme JSON carries n, origin, parameters and both vectors") {
  const json j = make_beta_scheme(4, 4, 1);
  CHECK(j.at("n") == 4);
  CHECK(j.at("origin") == "beta");
  CHECK(j.at("alpha") == 4.0);
  CHECK(j.at("beta") == 1.0);
  CHECK(j.at("raw").size() == 4);
  CHECK(j.at("normalized").size() == 4);
  const json ll = make_scheme(3, SchemeOrigin::loo_last);
  CHECK_FALSE(ll.contains("alpha"));
  const auto back = scheme_from_json(j);
  CHECK(back.normalized(2) == make_beta_scheme(4, 4, 1).normalized(2));
}
