#include "betashap/exact.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "betashap/error.hpp"
#include "betashap/parallel.hpp"

namespace betashap {

namespace {

void check_size(std::size_t n) {
  if (n > kExactLimit) {
    std::ostringstream msg;
    msg << "exact enumeration is limited to n <= " << kExactLimit << " (got n=" << n << ")";
    throw Error(ErrorKind::size_limit, msg.str());
  }
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "game has no players");
}

std::vector<PointId> resolve_ids(std::span<const PointId> ids, std::size_t n) {
  if (ids.empty()) return default_ids(n);
  if (ids.size() != n) throw Error(ErrorKind::invalid_parameter, "id count does not match game");
  return {ids.begin(), ids.end()};
}

// Inserts a zero bit at position `bit` into `m`.
constexpr std::uint64_t spread(std::uint64_t m, std::size_t bit) noexcept {
  const std::uint64_t low = m & ((std::uint64_t{1} << bit) - 1);
  return ((m >> bit) << (bit + 1)) | low;
}

MarginalProfile profile_for(std::span<const double> table, std::size_t n, std::size_t player,
                            PointId id) {
  MarginalProfile out;
  out.id = id;
  out.mean.assign(n, 0.0);
  out.variance.assign(n, 0.0);
  out.count.assign(n, 0);
  std::vector<double> m2(n, 0.0);
  const std::uint64_t bit = std::uint64_t{1} << player;
  const std::uint64_t others = std::uint64_t{1} << (n - 1);
  for (std::uint64_t m = 0; m < others; ++m) {
    const std::uint64_t s = spread(m, player);
    const auto j = static_cast<std::size_t>(std::popcount(s));  // index of cardinality j+1
    const double x = table[s | bit] - table[s];
    const auto c = ++out.count[j];
    const double delta = x - out.mean[j];
    out.mean[j] += delta / static_cast<double>(c);
    m2[j] += delta * (x - out.mean[j]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    out.variance[j] = out.count[j] > 1 ? m2[j] / static_cast<double>(out.count[j] - 1) : 0.0;
  }
  return out;
}

}  // namespace

std::vector<double> utility_table(const Game& game, std::size_t threads) {
  const std::size_t n = game.size();
  check_size(n);
  const std::size_t total = std::size_t{1} << n;
  std::vector<double> table(total);
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (total + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(total, (b + 1) * kBlock);
    for (std::size_t mask = b * kBlock; mask < end; ++mask) {
      table[mask] = game.value(Coalition::from_mask(n, mask));
    }
  });
  return table;
}

double marginal_exact(const Game& game, std::size_t player, std::size_t j) {
  const std::size_t n = game.size();
  check_size(n);
  if (player >= n) throw Error(ErrorKind::invalid_parameter, "player index out of range");
  if (j < 1 || j > n) throw Error(ErrorKind::invalid_parameter, "cardinality outside [1, n]");
  const std::uint64_t bit = std::uint64_t{1} << player;
  double total = 0.0;
  std::uint64_t count = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << (n - 1)); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != j - 1) continue;
    const std::uint64_t s = spread(m, player);
    total += game.value(Coalition::from_mask(n, s | bit)) - game.value(Coalition::from_mask(n, s));
    ++count;
  }
  return total / static_cast<double>(count);
}

std::vector<MarginalProfile> marginal_profiles_exact(std::span<const double> table,
                                                     std::span<const PointId> ids,
                                                     std::size_t threads) {
  if (table.empty() || !std::has_single_bit(table.size())) {
    throw Error(ErrorKind::invalid_parameter, "utility table size must be a power of two");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(table.size()));
  check_size(n);
  const auto names = resolve_ids(ids, n);
  std::vector<MarginalProfile> profiles(n);
  parallel_for(n, threads, [&](std::size_t i) { profiles[i] = profile_for(table, n, i, names[i]); });
  return profiles;
}

std::vector<MarginalProfile> marginal_profiles_exact(const Game& game,
                                                     std::span<const PointId> ids,
                                                     std::size_t threads) {
  const auto table = utility_table(game, threads);
  return marginal_profiles_exact(table, ids, threads);
}

ValueVector semivalue_from_profiles(std::span<const MarginalProfile> profiles,
                                    const WeightScheme& scheme) {
  if (profiles.size() != scheme.n()) {
    throw Error(ErrorKind::invalid_parameter, "scheme size does not match number of points");
  }
  ValueVector out;
  out.scheme = scheme;
  out.mode = ValuationMode::exact;
  for (const auto& profile : profiles) {
    out.ids.push_back(profile.id);
    out.values.push_back(semivalue_from_profile(profile, scheme));
  }
  return out;
}

ValueVector semivalue_exact(const Game& game, const WeightScheme& scheme,
                            std::span<const PointId> ids, std::size_t threads) {
  check_size(game.size());
  if (scheme.n() != game.size()) {
    throw Error(ErrorKind::invalid_parameter, "scheme size does not match number of points");
  }
  const auto profiles = marginal_profiles_exact(game, ids, threads);
  return semivalue_from_profiles(profiles, scheme);
}

ValueVector semivalue_exact(const Dataset& data, const UtilitySpec& spec,
                            const WeightScheme& scheme, std::size_t threads) {
  check_size(data.size());
  const DataUtility utility(data, spec);
  return semivalue_exact(utility, scheme, data.ids(), threads);
}

EfficiencyCheck shapley_efficiency_check(const Game& game, std::size_t threads) {
  const std::size_t n = game.size();
  check_size(n);
  const auto table = utility_table(game, threads);
  const auto profiles = marginal_profiles_exact(table, {}, threads);
  const auto values = semivalue_from_profiles(profiles, make_scheme(n, SchemeOrigin::data_shapley));
  EfficiencyCheck out;
  for (double v : values.values) out.sum_of_values += v;
  out.total_gain = table.back() - table.front();
  out.gap = std::fabs(out.sum_of_values - out.total_gain);
  return out;
}

}  // namespace betashap
