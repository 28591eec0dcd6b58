// SPDX-License-Identifier: Apache-2.0
//
// Deterministic CSV output: mandatory header, '\n' line endings, doubles
// at 17 significant digits so reruns are byte-identical.

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace kbm {

using CsvValue = std::variant<std::string, long long, double>;

std::string format_double(double v);  // %.17g, locale-free

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<CsvValue>& values);
  const std::string& content() const { return content_; }
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_; }

 private:
  std::string content_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

}  // namespace kbm
