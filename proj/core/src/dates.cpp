#include "citedyn/dates.hpp"

#include <charconv>
#include <cstdio>

#include "citedyn/errors.hpp"

namespace citedyn {

namespace {

int parse_digits(std::string_view text, std::string_view whole) {
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw InputError("malformed ISO date: '" + std::string(whole) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Day parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw InputError("malformed ISO date: '" + std::string(text) + "'");
  }
  const int y = parse_digits(text.substr(0, 4), text);
  const int m = parse_digits(text.substr(5, 2), text);
  const int d = parse_digits(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw InputError("invalid calendar date: '" + std::string(text) + "'");
  return Day{ymd};
}

std::string format_iso_date(Day day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int days_between(Day from, Day to) { return static_cast<int>((to - from).count()); }

int year_of(Day day) { return static_cast<int>(std::chrono::year_month_day{day}.year()); }

}  // namespace citedyn
