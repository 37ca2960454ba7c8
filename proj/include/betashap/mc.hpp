#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "betashap/utility.hpp"
#include "betashap/valuation.hpp"
#include "betashap/weights.hpp"

namespace betashap {

struct McConfig {
  std::size_t chains = 10;
  double rho = 1.0005;
  std::size_t min_iterations = 100;
  std::size_t max_iterations = 50000;
  /// Gelman-Rubin is evaluated once every `check_every` iterations per chain.
  std::size_t check_every = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Throws invalid-parameter unless chains >= 2, rho > 1 and the iteration
/// bounds are consistent.
void validate(const McConfig& config);

/// Running mean and sum of squared deviations of one chain's increments.
struct ChainState {
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t count = 0;

  void push(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  /// Sample variance (count - 1 denominator); zero below two samples.
  double variance() const noexcept {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
};

/// Potential scale reduction factor over the chains of one point:
///
///   R = sqrt((B - 1)/B + Bhat/(B*W))
///
/// with B the common iteration count, W the mean within-chain variance and
/// Bhat = B/(m-1) * sum_c (mean_c - grand_mean)^2. Returns 1 when W and Bhat
/// both vanish and +inf when only W does.
double gelman_rubin(std::span<const ChainState> chains);

enum class Termination { converged, max_iterations };

std::string_view to_string(Termination t) noexcept;

struct ValueReport {
  ValueVector values;
  std::vector<double> rhat;
  std::vector<double> standard_error;
  std::size_t chains = 0;
  std::size_t iterations_per_chain = 0;
  /// Utility queries issued by the sampler (two per non-zero-weight draw),
  /// independent of cache hits.
  std::uint64_t utility_queries = 0;
  Termination terminated_by = Termination::max_iterations;
};

/// Seed of the draw for (point, chain, iteration).
std::uint64_t draw_seed(std::uint64_t seed, std::size_t chain, std::size_t point,
                        std::size_t iteration) noexcept;

/// Monte-Carlo semivalue estimate.
///
/// Every chain updates one running mean per point; each iteration draws a
/// cardinality k uniformly from 1..n and a uniform subset S of size k-1 of the
/// other points, and records w~(k) * (U(S + z) - U(S)). Chains advance in
/// blocks of `check_every` iterations; after each block (and once
/// `min_iterations` is reached) the sampler stops when every point's R-hat is
/// below rho. The value is the average of chain means and the standard error
/// is sqrt(var(chain means) / chains).
ValueReport mc_estimate(const Game& game, const WeightScheme& scheme, const McConfig& config,
                        std::span<const PointId> ids = {});

ValueReport mc_estimate(const Dataset& data, const UtilitySpec& spec, const WeightScheme& scheme,
                        const McConfig& config);

}  // namespace betashap
