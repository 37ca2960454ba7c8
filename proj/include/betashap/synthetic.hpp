#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "betashap/dataset.hpp"

namespace betashap {

enum class SyntheticKind {
  gaussian_classification,  // x ~ N(0, I_5), logit link with beta = (2,1,0,0,0)
  gaussian_regression,      // x ~ N(0, I_5), y = x'(2,1,0,0,0) + N(0,1)
  snr_regression,           // x ~ N(0, I_10), y = x'b0 + N(0,1), b0 ~ N(0, I_10)
  snr_classification,       // x ~ N(0, I_3), logit link with beta = (5,0,0)
};

std::string_view to_string(SyntheticKind kind) noexcept;
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view text) noexcept;

std::size_t dimension_of(SyntheticKind kind) noexcept;
bool is_classification(SyntheticKind kind) noexcept;

/// Draws n points. Deterministic in (kind, n, seed): the stream is seeded with
/// derive_seed(seed, kind name); for snr-regression the coefficient vector is
/// drawn first. Each point then consumes d normals for x followed by one
/// uniform (Bernoulli label) or one normal (regression noise).
Dataset generate(SyntheticKind kind, std::size_t n, std::uint64_t seed);

Dataset gen_gaussian_classification(std::size_t n, std::uint64_t seed);

/// The regression coefficient vector used by snr-regression for a seed.
std::vector<double> snr_regression_coefficients(std::uint64_t seed);

/// Logistic link coefficients of a classification kind.
std::vector<double> classification_coefficients(SyntheticKind kind);

struct NoiseRecord {
  std::vector<PointId> flipped_ids;  // ascending
  double fraction = 0.0;
};

/// round(fraction * n) with halves rounded up.
std::size_t flip_count(double fraction, std::size_t n);

/// Inverts the binary labels of round(fraction * n) uniformly chosen points.
std::pair<Dataset, NoiseRecord> flip_labels(const Dataset& data, double fraction,
                                            std::uint64_t seed);

/// Inverts the labels listed in `record` (an involution).
Dataset apply_flips(const Dataset& data, const NoiseRecord& record);

}  // namespace betashap
