#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace betashap {

using PointId = std::int64_t;

enum class LabelKind { binary, real };

std::string_view to_string(LabelKind kind) noexcept;

/// Immutable table of labelled points with stable identifiers.
///
/// Features are stored row-major. Construction validates that ids are
/// unique, all values are finite and binary labels are exactly 0 or 1.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<PointId> ids, std::size_t dim, std::vector<double> features,
          std::vector<double> labels, LabelKind kind,
          std::vector<std::string> feature_names = {});

  /// Ids 0..n-1 in row order.
  static Dataset with_row_ids(std::size_t dim, std::vector<double> features,
                              std::vector<double> labels, LabelKind kind,
                              std::vector<std::string> feature_names = {});

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  LabelKind label_kind() const noexcept { return kind_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * dim_, dim_};
  }
  double label(std::size_t i) const noexcept { return labels_[i]; }
  PointId id(std::size_t i) const noexcept { return ids_[i]; }

  std::span<const PointId> ids() const noexcept { return ids_; }
  std::span<const double> labels() const noexcept { return labels_; }
  std::span<const double> features() const noexcept { return features_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  std::optional<std::size_t> index_of(PointId id) const;

  /// Copy with labels replaced (same ids, features and kind).
  Dataset with_labels(std::vector<double> labels) const;

 private:
  std::vector<PointId> ids_;
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<double> labels_;
  LabelKind kind_ = LabelKind::binary;
  std::vector<std::string> feature_names_;
  std::unordered_map<PointId, std::size_t> index_;
};

}  // namespace betashap
