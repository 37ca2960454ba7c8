#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace betashap {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

enum class SchemeOrigin { beta, explicit_weights, data_shapley, loo_first, loo_last };

std::string_view to_string(SchemeOrigin origin) noexcept;

/// Relative tolerance of the admissibility condition sum_j w~(j) = n.
inline constexpr double kAdmissibilityTolerance = 1e-9;

/// Semivalue weights on cardinalities 1..n. Index j-1 holds cardinality j.
///
/// `raw` is w(j), the weight of one subset of size j-1; `normalized` is
/// w~(j) = C(n-1, j-1) * w(j), the weight of the whole cardinality stratum.
/// Construction goes through make_scheme / make_explicit_scheme, which
/// enforce sum_j w~(j) = n.
class WeightScheme {
 public:
  std::size_t n() const noexcept { return raw_.size(); }
  SchemeOrigin origin() const noexcept { return origin_; }
  std::optional<BetaParams> beta_params() const noexcept { return params_; }

  std::span<const double> raw() const noexcept { return raw_; }
  std::span<const double> normalized() const noexcept { return normalized_; }

  double raw(std::size_t j) const { return raw_.at(j - 1); }
  double normalized(std::size_t j) const { return normalized_.at(j - 1); }

  /// Human-readable label, e.g. "beta(16,1)" or "loo-last".
  std::string label() const;

 private:
  friend WeightScheme make_scheme(std::size_t, SchemeOrigin, std::optional<BetaParams>);
  friend WeightScheme make_explicit_scheme(std::vector<double>);
  friend WeightScheme make_explicit_normalized_scheme(std::vector<double>);

  WeightScheme(SchemeOrigin origin, std::optional<BetaParams> params,
               std::vector<double> raw, std::vector<double> normalized);

  SchemeOrigin origin_;
  std::optional<BetaParams> params_;
  std::vector<double> raw_;
  std::vector<double> normalized_;
};

/// w_{alpha,beta}^{(n)}(j) from the product closed form, summed in log space.
double beta_weight(std::size_t n, std::size_t j, BetaParams params);

/// Builds a validated scheme. `params` is required for SchemeOrigin::beta and
/// ignored otherwise; explicit schemes use make_explicit_scheme.
WeightScheme make_scheme(std::size_t n, SchemeOrigin origin,
                         std::optional<BetaParams> params = std::nullopt);

inline WeightScheme make_beta_scheme(std::size_t n, double alpha, double beta) {
  return make_scheme(n, SchemeOrigin::beta, BetaParams{alpha, beta});
}

/// Scheme from an explicit raw weight vector w(1..n). Signed entries are
/// accepted as long as the admissibility sum holds.
WeightScheme make_explicit_scheme(std::vector<double> raw);

/// Scheme from an explicit normalized vector w~(1..n), stored verbatim.
WeightScheme make_explicit_normalized_scheme(std::vector<double> normalized);

/// Smallest cardinality j maximizing w~(j).
std::size_t argmax_cardinality(const WeightScheme& scheme) noexcept;

/// log C(n, k) as a compensated sum of logs.
double log_binomial(std::size_t n, std::size_t k);

/// log C(n-1, j-1) for j = 1..n.
std::vector<double> log_binomial_row(std::size_t n);

}  // namespace betashap
