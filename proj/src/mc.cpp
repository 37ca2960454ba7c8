#include "betashap/mc.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "betashap/error.hpp"
#include "betashap/parallel.hpp"
#include "betashap/rng.hpp"

namespace betashap {

void validate(const McConfig& c) {
  if (c.chains < 2) throw Error(ErrorKind::invalid_parameter, "Gelman-Rubin needs at least 2 chains");
  if (!(c.rho > 1.0)) throw Error(ErrorKind::invalid_parameter, "rho must exceed 1");
  if (c.check_every == 0) throw Error(ErrorKind::invalid_parameter, "check_every must be positive");
  if (c.min_iterations < 2) throw Error(ErrorKind::invalid_parameter, "min_iterations must be >= 2");
  if (c.max_iterations < c.min_iterations) {
    throw Error(ErrorKind::invalid_parameter, "max_iterations is below min_iterations");
  }
}

double gelman_rubin(std::span<const ChainState> chains) {
  if (chains.size() < 2) throw Error(ErrorKind::insufficient_data, "Gelman-Rubin needs >= 2 chains");
  const std::uint64_t b = chains.front().count;
  for (const auto& c : chains) {
    if (c.count < 2) throw Error(ErrorKind::insufficient_data, "each chain needs >= 2 iterations");
    if (c.count != b) throw Error(ErrorKind::invalid_parameter, "chains have unequal lengths");
  }
  const auto m = static_cast<double>(chains.size());
  const auto len = static_cast<double>(b);
  double grand = 0.0;
  double within = 0.0;
  for (const auto& c : chains) {
    grand += c.mean;
    within += c.variance();
  }
  grand /= m;
  within /= m;
  double spread = 0.0;
  for (const auto& c : chains) spread += (c.mean - grand) * (c.mean - grand);
  const double between = len * spread / (m - 1.0);
  if (within == 0.0) return between == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt((len - 1.0) / len + between / (len * within));
}

std::string_view to_string(Termination t) noexcept {
  return t == Termination::converged ? "converged" : "max-iterations";
}

std::uint64_t draw_seed(std::uint64_t seed, std::size_t chain, std::size_t point,
                        std::size_t iteration) noexcept {
  return derive_seed(seed, {chain, point, iteration});
}

ValueReport mc_estimate(const Game& game, const WeightScheme& scheme, const McConfig& config,
                        std::span<const PointId> ids) {
  validate(config);
  const std::size_t n = game.size();
  if (n < 2) throw Error(ErrorKind::invalid_parameter, "Monte-Carlo valuation needs n >= 2");
  if (scheme.n() != n) throw Error(ErrorKind::invalid_parameter, "scheme size does not match game");
  if (!ids.empty() && ids.size() != n) {
    throw Error(ErrorKind::invalid_parameter, "id count does not match game");
  }

  const auto weights = scheme.normalized();
  const std::size_t chains = config.chains;
  // state[point * chains + chain]
  std::vector<ChainState> state(n * chains);
  std::vector<std::uint64_t> queries(n * chains, 0);

  auto run_block = [&](std::size_t task, std::size_t begin, std::size_t end) {
    const std::size_t point = task / chains;
    const std::size_t chain = task % chains;
    ChainState& st = state[task];
    std::vector<std::size_t> pool(n - 1);
    for (std::size_t it = begin; it < end; ++it) {
      Rng rng(draw_seed(config.seed, chain, point, it));
      const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform_index(n));
      const double w = weights[k - 1];
      if (w == 0.0) {
        st.push(0.0);
        continue;
      }
      std::iota(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(point), std::size_t{0});
      std::iota(pool.begin() + static_cast<std::ptrdiff_t>(point), pool.end(), point + 1);
      partial_shuffle(rng, pool, k - 1);
      Coalition subset(n);
      for (std::size_t s = 0; s + 1 < k; ++s) subset.insert(pool[s]);
      const double without = game.value(subset);
      subset.insert(point);
      const double with = game.value(subset);
      queries[task] += 2;
      st.push(w * (with - without));
    }
  };

  ValueReport report;
  report.chains = chains;
  report.rhat.assign(n, std::numeric_limits<double>::infinity());
  std::vector<ChainState> scratch(chains);

  std::size_t done = 0;
  while (done < config.max_iterations) {
    const std::size_t target = std::min(config.max_iterations, done + config.check_every);
    parallel_for(n * chains, config.threads,
                 [&](std::size_t task) { run_block(task, done, target); });
    done = target;
    if (done < config.min_iterations) continue;
    bool all_below = true;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t c = 0; c < chains; ++c) scratch[c] = state[p * chains + c];
      report.rhat[p] = gelman_rubin(scratch);
      all_below = all_below && report.rhat[p] < config.rho;
    }
    if (all_below) {
      report.terminated_by = Termination::converged;
      break;
    }
  }

  report.iterations_per_chain = done;
  report.values.ids = ids.empty() ? default_ids(n) : std::vector<PointId>(ids.begin(), ids.end());
  report.values.scheme = scheme;
  report.values.mode = ValuationMode::mc;
  report.values.values.resize(n);
  report.standard_error.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    double mean = 0.0;
    for (std::size_t c = 0; c < chains; ++c) mean += state[p * chains + c].mean;
    mean /= static_cast<double>(chains);
    double spread = 0.0;
    for (std::size_t c = 0; c < chains; ++c) {
      const double d = state[p * chains + c].mean - mean;
      spread += d * d;
    }
    report.values.values[p] = mean;
    report.standard_error[p] =
        std::sqrt(spread / static_cast<double>(chains - 1) / static_cast<double>(chains));
  }
  report.utility_queries = std::accumulate(queries.begin(), queries.end(), std::uint64_t{0});
  return report;
}

ValueReport mc_estimate(const Dataset& data, const UtilitySpec& spec, const WeightScheme& scheme,
                        const McConfig& config) {
  const DataUtility utility(data, spec, std::make_shared<UtilityCache>());
  return mc_estimate(utility, scheme, config, data.ids());
}

}  // namespace betashap
