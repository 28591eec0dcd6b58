// SPDX-License-Identifier: Apache-2.0

#include "kbm/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kbm/csv.hpp"
#include "kbm/errors.hpp"

namespace kbm {

std::string sha256_hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest failure");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("sha256_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

RunManifest::RunManifest(std::string subcommand, std::string out_dir)
    : subcommand_(std::move(subcommand)),
      out_dir_(std::move(out_dir)),
      start_(std::chrono::steady_clock::now()) {}

void RunManifest::set_config(const std::string& key, const std::string& value) {
  config_[key] = value;
}
void RunManifest::set_config(const std::string& key, double value) {
  config_[key] = format_double(value);
}
void RunManifest::set_config(const std::string& key, long long value) {
  config_[key] = std::to_string(value);
}
void RunManifest::set_flag(const std::string& key, bool value) { flags_[key] = value; }

void RunManifest::add_output(const std::string& path) {
  output_hashes_[path] = sha256_file(path);
}

void RunManifest::write() {
  nlohmann::json j;
  j["tool"] = "kbm";
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand_;
  j["config"] = config_;
  j["flags"] = flags_;
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  j["wall_time_s"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() / 1000.0;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& [path, hash] : output_hashes_) {
    outs.push_back({{"path", path}, {"sha256", hash}});
  }
  j["outputs"] = outs;
  std::ofstream out(out_dir_ + "/manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("RunManifest: cannot open " + out_dir_ + "/manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace kbm
