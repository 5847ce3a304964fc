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

#ifndef GAZTRACK_DATE_HPP
#define GAZTRACK_DATE_HPP

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace gaztrack {

/// A valid proleptic Gregorian calendar date.
class Date {
 public:
  Date() = default;  // 1970-01-01

  /// Returns nullopt unless `y-m-d` names a real calendar day.
  static std::optional<Date> from_ymd(int y, unsigned m, unsigned d);

  /// Strict "YYYY-MM-DD".
  static std::optional<Date> parse_iso(std::string_view text);

  /// Strict "DD/MM/YYYY", the layout used by Brazilian gazette metadata.
  static std::optional<Date> parse_dmy(std::string_view text);

  std::string iso() const;

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  friend bool operator==(Date const&, Date const&) = default;
  friend auto operator<=>(Date const& a, Date const& b) {
    return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
  }

 private:
  explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

}  // namespace gaztrack

#endif  // GAZTRACK_DATE_HPP
