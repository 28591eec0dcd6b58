// SPDX-License-Identifier: Apache-2.0
//
// Run manifest: one JSON per run echoing the configuration, seeds, version,
// wall time and SHA-256 content hashes of every output file.

#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace kbm {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& content);
std::string sha256_file(const std::string& path);

class RunManifest {
 public:
  RunManifest(std::string subcommand, std::string out_dir);

  void set_config(const std::string& key, const std::string& value);
  void set_config(const std::string& key, double value);
  void set_config(const std::string& key, long long value);
  void set_flag(const std::string& key, bool value);

  // registers an output file (must exist; hashed immediately)
  void add_output(const std::string& path);

  // writes <out_dir>/manifest.json, recording elapsed wall time
  void write();

  const std::map<std::string, std::string>& outputs() const { return output_hashes_; }

 private:
  std::string subcommand_, out_dir_;
  std::map<std::string, std::string> config_;
  std::map<std::string, bool> flags_;
  std::map<std::string, std::string> output_hashes_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace kbm
