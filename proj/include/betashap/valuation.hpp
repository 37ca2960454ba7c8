#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "betashap/dataset.hpp"
#include "betashap/weights.hpp"

namespace betashap {

enum class ValuationMode { exact, mc, external };

std::string_view to_string(ValuationMode mode) noexcept;

/// One value per valued point, in the order of `ids`.
struct ValueVector {
  std::vector<PointId> ids;
  std::vector<double> values;
  std::optional<WeightScheme> scheme;
  ValuationMode mode = ValuationMode::external;

  std::size_t size() const noexcept { return ids.size(); }
};

/// Per-cardinality statistics of the marginal contribution of one point.
/// Index j-1 holds cardinality j: the mean of U(S + z) - U(S) over subsets S
/// of size j-1 not containing z, the sample variance of those summands and
/// the number of subsets averaged.
struct MarginalProfile {
  PointId id = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<std::uint64_t> count;
};

/// (1/n) * sum_j w~(j) * mean_j, accumulated in increasing j.
double semivalue_from_profile(const MarginalProfile& profile, const WeightScheme& scheme);

/// Default ids 0..n-1.
std::vector<PointId> default_ids(std::size_t n);

}  // namespace betashap
