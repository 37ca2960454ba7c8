#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "betashap/utility.hpp"
#include "betashap/valuation.hpp"
#include "betashap/weights.hpp"

namespace betashap {

/// Largest game the enumeration engine accepts.
inline constexpr std::size_t kExactLimit = 20;

/// U(S) for every bitmask S in [0, 2^n). Throws size-limit above kExactLimit.
std::vector<double> utility_table(const Game& game, std::size_t threads = 1);

/// Delta_j for one player: the average of U(S + z) - U(S) over all subsets of
/// size j-1 of the other players.
double marginal_exact(const Game& game, std::size_t player, std::size_t j);

/// Full marginal profiles from a precomputed utility table. `ids` names the
/// players (0..n-1 when empty).
std::vector<MarginalProfile> marginal_profiles_exact(std::span<const double> table,
                                                     std::span<const PointId> ids = {},
                                                     std::size_t threads = 1);

std::vector<MarginalProfile> marginal_profiles_exact(const Game& game,
                                                     std::span<const PointId> ids = {},
                                                     std::size_t threads = 1);

/// Semivalue of every player by exhaustive enumeration.
ValueVector semivalue_exact(const Game& game, const WeightScheme& scheme,
                            std::span<const PointId> ids = {}, std::size_t threads = 1);

/// Same, for U built from a dataset and utility spec (ids from the dataset).
ValueVector semivalue_exact(const Dataset& data, const UtilitySpec& spec,
                            const WeightScheme& scheme, std::size_t threads = 1);

/// Semivalues computed from stored profiles.
ValueVector semivalue_from_profiles(std::span<const MarginalProfile> profiles,
                                    const WeightScheme& scheme);

struct EfficiencyCheck {
  double sum_of_values = 0.0;
  double total_gain = 0.0;  // U(D) - U(empty)
  double gap = 0.0;
};

/// Data Shapley efficiency: compares the sum of Beta(1,1) values with
/// U(D) - U(empty).
EfficiencyCheck shapley_efficiency_check(const Game& game, std::size_t threads = 1);

}  // namespace betashap
