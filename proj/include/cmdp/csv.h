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

#ifndef CMDP_CSV_H_
#define CMDP_CSV_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cmdp {

// One data row of a delimited text file with the 1-based line it came from.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Comma-delimited table with a mandatory header. Blank lines and lines
// starting with '#' are skipped; fields are whitespace-trimmed.
class CsvTable {
 public:
  // Reads `path` and checks that the header is exactly `expected_header`; an
  // empty `expected_header` accepts any header.
  // Throws IoError if the file cannot be opened and ParseError (with the line
  // number) on a header mismatch or a row of the wrong width.
  static CsvTable Read(const std::string& path,
                       const std::vector<std::string>& expected_header);
  static CsvTable Parse(std::string_view text,
                        const std::vector<std::string>& expected_header,
                        const std::string& source_name = "<memory>");

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<CsvRow>& rows() const { return rows_; }
  const std::string& source() const { return source_; }
  // Position of a header column; throws ParseError when absent.
  std::size_t ColumnIndex(const std::string& name) const;

  // Lines beginning with '#', without the marker, in file order.
  const std::vector<std::string>& comments() const { return comments_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<CsvRow> rows_;
  std::vector<std::string> comments_;
};

std::vector<std::string> SplitFields(std::string_view line, char delimiter);
std::string_view Trim(std::string_view text);

// Error message prefix "source:line: ".
std::string Where(const std::string& source, std::size_t line);

// Writes `contents` to `path`, throwing IoError on failure.
void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

}  // namespace cmdp

#endif  // CMDP_CSV_H_
