#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "betashap/dataset.hpp"
#include "betashap/exact.hpp"
#include "betashap/mc.hpp"
#include "betashap/valuation.hpp"

namespace betashap {

/// Column layout of a dataset CSV: a header row, one label column, every
/// other column a numeric feature. Ids follow row order starting at 0.
struct CsvSchema {
  std::string label_column = "y";
  /// Inferred when unset: binary if every label is 0 or 1, otherwise real.
  std::optional<LabelKind> label_kind;
};

Dataset parse_csv(std::istream& in, const CsvSchema& schema, std::string_view source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes features then the label column "y", shortest round-trip decimals.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Reads the "id" and "value" columns of a values CSV (extra columns allowed).
ValueVector load_values_csv(const std::filesystem::path& path);

void write_values_csv(std::ostream& out, const ValueVector& values);
void write_report_csv(std::ostream& out, const ValueReport& report);
void write_profiles_csv(std::ostream& out, std::span<const MarginalProfile> profiles);

}  // namespace betashap
