// Copyright 2026 The gaztrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZTRACK_CSV_HPP
#define GAZTRACK_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

// RFC 4180 comma-separated values.
namespace gaztrack::csv {

using Row = std::vector<std::string>;

/// Parses a whole document. Quoted fields may contain commas, doubled
/// quotes and line breaks; CRLF and LF line endings are both accepted. A
/// leading UTF-8 byte order mark is skipped. Blank lines are dropped.
/// Throws Error(kMalformedRecord) on an unterminated quote or stray quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// One line terminated by CRLF.
std::string format_row(Row const& row);

}  // namespace gaztrack::csv

#endif  // GAZTRACK_CSV_HPP
