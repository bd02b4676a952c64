#include "qcpd/time.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace qcpd {

namespace chr = std::chrono;

namespace {

int read_digits(std::string_view text, std::size_t& pos, int count) {
  if (pos + count > text.size()) throw std::invalid_argument("truncated timestamp: " + std::string(text));
  int value = 0;
  for (int k = 0; k < count; ++k) {
    char c = text[pos++];
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad digit in timestamp: " + std::string(text));
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t& pos, char expected) {
  if (pos >= text.size() || text[pos] != expected)
    throw std::invalid_argument("malformed timestamp: " + std::string(text));
  ++pos;
}

}  // namespace

YearMonth YearMonth::from_serial(int serial) {
  int year = serial >= 0 ? serial / 12 : (serial - 11) / 12;
  return YearMonth{year, serial - year * 12 + 1};
}

YearMonth YearMonth::of(Instant t) {
  chr::year_month_day ymd{chr::floor<chr::days>(t)};
  return YearMonth{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
}

YearMonth YearMonth::parse(std::string_view text) {
  std::size_t pos = 0;
  YearMonth ym;
  ym.year = read_digits(text, pos, 4);
  expect_char(text, pos, '-');
  ym.month = read_digits(text, pos, 2);
  if (pos != text.size() || ym.month < 1 || ym.month > 12)
    throw std::invalid_argument("expected YYYY-MM, got: " + std::string(text));
  return ym;
}

Instant YearMonth::first_instant() const {
  chr::sys_days d = chr::year{year} / chr::month{static_cast<unsigned>(month)} / chr::day{1};
  return Instant{d};
}

int YearMonth::days() const {
  return static_cast<int>((plus_months(1).first_instant() - first_instant()).count() / 86400);
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

Instant parse_timestamp(std::string_view text) {
  std::size_t pos = 0;
  int year = read_digits(text, pos, 4);
  expect_char(text, pos, '-');
  int month = read_digits(text, pos, 2);
  expect_char(text, pos, '-');
  int day = read_digits(text, pos, 2);
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' '))
    throw std::invalid_argument("malformed timestamp: " + std::string(text));
  ++pos;
  int hour = read_digits(text, pos, 2);
  expect_char(text, pos, ':');
  int minute = read_digits(text, pos, 2);
  expect_char(text, pos, ':');
  int second = read_digits(text, pos, 2);
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  int offset_minutes = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int sign = text[pos] == '-' ? -1 : 1;
    ++pos;
    int oh = read_digits(text, pos, 2);
    expect_char(text, pos, ':');
    int om = read_digits(text, pos, 2);
    offset_minutes = sign * (oh * 60 + om);
  } else {
    throw std::invalid_argument("timestamp lacks UTC offset: " + std::string(text));
  }
  if (pos != text.size()) throw std::invalid_argument("trailing characters in timestamp: " + std::string(text));

  chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                          chr::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60)
    throw std::invalid_argument("timestamp out of range: " + std::string(text));
  Instant t{chr::sys_days{ymd}};
  t += chr::hours{hour} + chr::minutes{minute} + chr::seconds{second};
  t -= chr::minutes{offset_minutes};
  return t;
}

std::string format_timestamp(Instant t) {
  auto day = chr::floor<chr::days>(t);
  chr::year_month_day ymd{day};
  chr::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace qcpd
