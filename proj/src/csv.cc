// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmdp/csv.h"

#include <fstream>
#include <sstream>

#include "cmdp/common.h"

namespace cmdp {

std::string_view Trim(std::string_view text) {
  const char* ws = " \t\r\n";
  const std::size_t first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const std::size_t last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string> SplitFields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  while (true) {
    const std::size_t pos = line.find(delimiter);
    fields.emplace_back(Trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return fields;
}

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

CsvTable CsvTable::Parse(std::string_view text,
                         const std::vector<std::string>& expected_header,
                         const std::string& source_name) {
  CsvTable table;
  table.source_ = source_name;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    // Tolerate a UTF-8 byte order mark on the first line.
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") {
      line.remove_prefix(3);
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments_.emplace_back(Trim(line.substr(1)));
      continue;
    }
    std::vector<std::string> fields = SplitFields(line, ',');
    if (!have_header) {
      if (!expected_header.empty() && fields != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
          if (i) want += ',';
          want += expected_header[i];
        }
        throw ParseError(Where(source_name, line_no) +
                         "expected header '" + want + "', got '" +
                         std::string(line) + "'");
      }
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw ParseError(Where(source_name, line_no) + "expected " +
                       std::to_string(table.header_.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    table.rows_.push_back(CsvRow{line_no, std::move(fields)});
  }
  if (!have_header) {
    throw ParseError(source_name + ": missing header");
  }
  return table;
}

CsvTable CsvTable::Read(const std::string& path,
                        const std::vector<std::string>& expected_header) {
  return Parse(ReadTextFile(path), expected_header, path);
}

std::size_t CsvTable::ColumnIndex(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ParseError(source_ + ": missing column '" + name + "'");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cmdp
