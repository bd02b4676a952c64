#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace qcpd {

/// UTC instant at second resolution.
using Instant = std::chrono::sys_seconds;

struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  /// Months since 0000-01, convenient for arithmetic.
  int serial() const { return year * 12 + (month - 1); }
  static YearMonth from_serial(int serial);
  static YearMonth of(Instant t);
  /// Parses "YYYY-MM".
  static YearMonth parse(std::string_view text);

  YearMonth plus_months(int n) const { return from_serial(serial() + n); }
  Instant first_instant() const;
  int days() const;
  std::string str() const;

  friend bool operator==(const YearMonth&, const YearMonth&) = default;
  friend auto operator<=>(const YearMonth& a, const YearMonth& b) { return a.serial() <=> b.serial(); }
};

/// Parses an RFC 3339 timestamp ("2010-05-01T12:00:00Z", offsets and
/// fractional seconds accepted; fractions are truncated).
Instant parse_timestamp(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Instant t);

/// Elapsed time in (fractional) days.
inline double days_between(Instant from, Instant to) {
  return static_cast<double>((to - from).count()) / 86400.0;
}

}  // namespace qcpd
