// SPDX-License-Identifier: Apache-2.0

#include "kbm/csv.hpp"

#include <cstdio>
#include <fstream>

#include "kbm/errors.hpp"

namespace kbm {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) content_ += ',';
    content_ += header[i];
  }
  content_ += '\n';
}

void CsvWriter::row(const std::vector<CsvValue>& values) {
  if (values.size() != columns_)
    throw InvalidArgument("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) content_ += ',';
    if (const auto* s = std::get_if<std::string>(&values[i])) {
      content_ += *s;
    } else if (const auto* n = std::get_if<long long>(&values[i])) {
      content_ += std::to_string(*n);
    } else {
      content_ += format_double(std::get<double>(values[i]));
    }
  }
  content_ += '\n';
  ++rows_;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("CsvWriter: cannot open " + path);
  out << content_;
}

}  // namespace kbm
