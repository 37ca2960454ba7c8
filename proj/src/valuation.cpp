#include "betashap/valuation.hpp"

#include <numeric>

#include "betashap/error.hpp"

namespace betashap {

std::string_view to_string(ValuationMode mode) noexcept {
  switch (mode) {
    case ValuationMode::exact: return "exact";
    case ValuationMode::mc: return "mc";
    case ValuationMode::external: return "external";
  }
  return "unknown";
}

double semivalue_from_profile(const MarginalProfile& profile, const WeightScheme& scheme) {
  const std::size_t n = scheme.n();
  if (profile.mean.size() != n) {
    throw Error(ErrorKind::invalid_parameter, "profile length does not match scheme");
  }
  const auto w = scheme.normalized();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] != 0.0) total += w[j] * profile.mean[j];
  }
  return total / static_cast<double>(n);
}

std::vector<PointId> default_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}

}  // namespace betashap
