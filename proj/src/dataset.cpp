#include "betashap/dataset.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "betashap/error.hpp"

namespace betashap {

std::string_view to_string(LabelKind kind) noexcept {
  return kind == LabelKind::binary ? "binary" : "real";
}

Dataset::Dataset(std::vector<PointId> ids, std::size_t dim, std::vector<double> features,
                 std::vector<double> labels, LabelKind kind,
                 std::vector<std::string> feature_names)
    : ids_(std::move(ids)),
      dim_(dim),
      features_(std::move(features)),
      labels_(std::move(labels)),
      kind_(kind),
      feature_names_(std::move(feature_names)) {
  if (dim_ == 0) throw Error(ErrorKind::invalid_parameter, "dataset dimension must be positive");
  if (labels_.size() != ids_.size() || features_.size() != ids_.size() * dim_) {
    throw Error(ErrorKind::invalid_parameter, "dataset arrays have inconsistent sizes");
  }
  if (feature_names_.empty()) {
    for (std::size_t k = 0; k < dim_; ++k) feature_names_.push_back("x" + std::to_string(k + 1));
  } else if (feature_names_.size() != dim_) {
    throw Error(ErrorKind::invalid_parameter, "feature name count does not match dimension");
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_[i])) {
      std::ostringstream msg;
      msg << "non-finite feature at row " << i / dim_ << ", column " << i % dim_;
      throw Error(ErrorKind::invalid_parameter, msg.str());
    }
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const double y = labels_[i];
    if (!std::isfinite(y) || (kind_ == LabelKind::binary && y != 0.0 && y != 1.0)) {
      std::ostringstream msg;
      msg << "invalid " << to_string(kind_) << " label " << y << " at row " << i;
      throw Error(ErrorKind::invalid_parameter, msg.str());
    }
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorKind::invalid_parameter, "duplicate point id " + std::to_string(ids_[i]));
    }
  }
}

Dataset Dataset::with_row_ids(std::size_t dim, std::vector<double> features,
                              std::vector<double> labels, LabelKind kind,
                              std::vector<std::string> feature_names) {
  std::vector<PointId> ids(labels.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  return Dataset(std::move(ids), dim, std::move(features), std::move(labels), kind,
                 std::move(feature_names));
}

std::optional<std::size_t> Dataset::index_of(PointId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::with_labels(std::vector<double> labels) const {
  return Dataset(ids_, dim_, features_, std::move(labels), kind_, feature_names_);
}

}  // namespace betashap
