#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "betashap/error.hpp"

namespace betashap::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io_error, "sha256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::io_error, "failed writing '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void Manifest::add_input(const std::filesystem::path& path) {
  inputs_.push_back(json{{"path", path.generic_string()}, {"sha256", sha256_file(path)}});
}

void Manifest::add_output(const std::filesystem::path& dir, const std::string& name) {
  outputs_.push_back(json{{"path", name}, {"sha256", sha256_file(dir / name)}});
}

void Manifest::write(const std::filesystem::path& path) const {
  json j{{"command", command_}, {"config", config_}, {"inputs", inputs_}, {"outputs", outputs_}};
  for (const auto& [key, value] : extra_.items()) j[key] = value;
  write_text(path, dump(j));
}

}  // namespace betashap::cli
