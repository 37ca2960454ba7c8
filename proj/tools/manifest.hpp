#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "betashap/serialize.hpp"

namespace betashap::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Pretty JSON with a trailing newline.
std::string dump(const json& j);

/// Record of one command run: configuration, input and output digests. Only
/// settings that can change outputs are recorded, so the manifest itself is
/// reproducible.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  json& config() { return config_; }
  json& extra() { return extra_; }
  void add_input(const std::filesystem::path& path);
  /// `name` is relative to `dir`.
  void add_output(const std::filesystem::path& dir, const std::string& name);
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  json config_ = json::object();
  json extra_ = json::object();
  json inputs_ = json::array();
  json outputs_ = json::array();
};

}  // namespace betashap::cli
