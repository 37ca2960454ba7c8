#include "betashap/weights.hpp"

#include <cmath>
#include <sstream>

#include "betashap/error.hpp"

namespace betashap {

namespace {

// Neumaier-compensated accumulator in extended precision. The weight
// exponents are differences of sums with up to 10^6 terms of size ~10, so
// plain double accumulation loses the digits the admissibility check needs.
class LogSum {
 public:
  void add(long double x) noexcept {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const noexcept { return sum_ + carry_; }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

// prefix[m] = sum_{k=1..m} log(base + k - 1), m = 0..count.
std::vector<long double> log_rising_prefix(long double base, std::size_t count) {
  std::vector<long double> prefix(count + 1, 0.0L);
  LogSum acc;
  for (std::size_t k = 1; k <= count; ++k) {
    acc.add(std::log(base + static_cast<long double>(k - 1)));
    prefix[k] = acc.value();
  }
  return prefix;
}

void check_params(BetaParams p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    std::ostringstream msg;
    msg << "Beta parameters must be positive and finite (alpha=" << p.alpha
        << ", beta=" << p.beta << ")";
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }
}

void check_admissible(std::span<const double> normalized) {
  const auto n = static_cast<double>(normalized.size());
  LogSum total;
  for (double w : normalized) total.add(w);
  const double gap = std::fabs(static_cast<double>(total.value()) - n) / n;
  if (!(gap <= kAdmissibilityTolerance)) {
    std::ostringstream msg;
    msg << "normalized weights sum to " << static_cast<double>(total.value())
        << ", expected " << n << " (relative gap " << gap << ")";
    throw Error(ErrorKind::admissibility_violation, msg.str());
  }
}

}  // namespace

std::string_view to_string(SchemeOrigin origin) noexcept {
  switch (origin) {
    case SchemeOrigin::beta: return "beta";
    case SchemeOrigin::explicit_weights: return "explicit";
    case SchemeOrigin::data_shapley: return "data-shapley";
    case SchemeOrigin::loo_first: return "loo-first";
    case SchemeOrigin::loo_last: return "loo-last";
  }
  return "unknown";
}

WeightScheme::WeightScheme(SchemeOrigin origin, std::optional<BetaParams> params,
                           std::vector<double> raw, std::vector<double> normalized)
    : origin_(origin), params_(params), raw_(std::move(raw)), normalized_(std::move(normalized)) {}

std::string WeightScheme::label() const {
  if (origin_ == SchemeOrigin::beta && params_) {
    std::ostringstream out;
    out << "beta(" << params_->alpha << "," << params_->beta << ")";
    return out.str();
  }
  return std::string(to_string(origin_));
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) throw Error(ErrorKind::invalid_parameter, "log_binomial: k > n");
  k = std::min(k, n - k);
  LogSum acc;
  for (std::size_t i = 1; i <= k; ++i) {
    acc.add(std::log(static_cast<long double>(n - k + i)) - std::log(static_cast<long double>(i)));
  }
  return static_cast<double>(acc.value());
}

std::vector<double> log_binomial_row(std::size_t n) {
  if (n == 0) return {};
  const auto log_fact = log_rising_prefix(1.0L, n);
  std::vector<double> row(n);
  for (std::size_t j = 1; j <= n; ++j) {
    row[j - 1] = static_cast<double>(log_fact[n - 1] - log_fact[j - 1] - log_fact[n - j]);
  }
  return row;
}

double beta_weight(std::size_t n, std::size_t j, BetaParams p) {
  check_params(p);
  if (n == 0 || j < 1 || j > n) {
    std::ostringstream msg;
    msg << "cardinality j=" << j << " outside [1, " << n << "]";
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }
  LogSum acc;
  acc.add(std::log(static_cast<long double>(n)));
  for (std::size_t k = 1; k + 1 <= j; ++k) acc.add(std::log(p.beta + static_cast<long double>(k - 1)));
  for (std::size_t k = 1; k <= n - j; ++k) acc.add(std::log(p.alpha + static_cast<long double>(k - 1)));
  const long double ab = static_cast<long double>(p.alpha) + p.beta;
  for (std::size_t k = 1; k + 1 <= n; ++k) acc.add(-std::log(ab + static_cast<long double>(k - 1)));
  return static_cast<double>(std::exp(acc.value()));
}

WeightScheme make_scheme(std::size_t n, SchemeOrigin origin, std::optional<BetaParams> params) {
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "scheme needs n >= 1");

  // log C(n-1, j-1) for j = 1..n from a log-factorial table.
  const auto log_fact = log_rising_prefix(1.0L, n);
  auto log_choose = [&](std::size_t j) {
    return log_fact[n - 1] - log_fact[j - 1] - log_fact[n - j];
  };

  std::vector<double> raw(n, 0.0);
  std::vector<double> normalized(n, 0.0);

  switch (origin) {
    case SchemeOrigin::beta: {
      if (!params) throw Error(ErrorKind::invalid_parameter, "beta scheme needs (alpha, beta)");
      check_params(*params);
      if (params->alpha == 1.0 && params->beta == 1.0) {
        // Both products equal the factorials, so w~ is identically one.
        for (std::size_t j = 1; j <= n; ++j) {
          raw[j - 1] = static_cast<double>(std::exp(-log_choose(j)));
          normalized[j - 1] = 1.0;
        }
        break;
      }
      const auto up_beta = log_rising_prefix(params->beta, n);
      const auto up_alpha = log_rising_prefix(params->alpha, n);
      const auto up_sum = log_rising_prefix(static_cast<long double>(params->alpha) + params->beta, n);
      const long double log_n = std::log(static_cast<long double>(n));
      for (std::size_t j = 1; j <= n; ++j) {
        const long double log_w = log_n + up_beta[j - 1] + up_alpha[n - j] - up_sum[n - 1];
        raw[j - 1] = static_cast<double>(std::exp(log_w));
        normalized[j - 1] = static_cast<double>(std::exp(log_w + log_choose(j)));
      }
      break;
    }
    case SchemeOrigin::data_shapley:
      for (std::size_t j = 1; j <= n; ++j) {
        raw[j - 1] = static_cast<double>(std::exp(-log_choose(j)));
        normalized[j - 1] = 1.0;
      }
      break;
    case SchemeOrigin::loo_last:
      raw[n - 1] = static_cast<double>(n);
      normalized[n - 1] = static_cast<double>(n);
      break;
    case SchemeOrigin::loo_first:
      if (n < 2) throw Error(ErrorKind::invalid_parameter, "loo-first needs n >= 2");
      // Every subset of size one gets weight n / (n - 1).
      raw[1] = static_cast<double>(n) / static_cast<double>(n - 1);
      normalized[1] = static_cast<double>(n);
      break;
    case SchemeOrigin::explicit_weights:
      throw Error(ErrorKind::invalid_parameter, "explicit schemes are built with make_explicit_scheme");
  }

  check_admissible(normalized);
  if (origin != SchemeOrigin::beta) params.reset();
  return WeightScheme(origin, params, std::move(raw), std::move(normalized));
}

WeightScheme make_explicit_scheme(std::vector<double> raw) {
  const std::size_t n = raw.size();
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "explicit scheme needs n >= 1");
  const auto log_choose = log_binomial_row(n);
  std::vector<double> normalized(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (!std::isfinite(raw[j - 1])) {
      throw Error(ErrorKind::invalid_parameter, "explicit weights must be finite");
    }
    normalized[j - 1] = raw[j - 1] * std::exp(log_choose[j - 1]);
  }
  check_admissible(normalized);
  return WeightScheme(SchemeOrigin::explicit_weights, std::nullopt, std::move(raw),
                      std::move(normalized));
}

WeightScheme make_explicit_normalized_scheme(std::vector<double> normalized) {
  const std::size_t n = normalized.size();
  if (n == 0) throw Error(ErrorKind::invalid_parameter, "explicit scheme needs n >= 1");
  const auto log_choose = log_binomial_row(n);
  std::vector<double> raw(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (!std::isfinite(normalized[j - 1])) {
      throw Error(ErrorKind::invalid_parameter, "explicit weights must be finite");
    }
    raw[j - 1] = normalized[j - 1] * std::exp(-log_choose[j - 1]);
  }
  check_admissible(normalized);
  return WeightScheme(SchemeOrigin::explicit_weights, std::nullopt, std::move(raw),
                      std::move(normalized));
}

std::size_t argmax_cardinality(const WeightScheme& scheme) noexcept {
  const auto w = scheme.normalized();
  std::size_t best = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] > w[best]) best = i;
  }
  return best + 1;
}

}  // namespace betashap
