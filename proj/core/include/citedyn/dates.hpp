#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace citedyn {

using Day = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws InputError
/// on anything else, including impossible dates such as 2019-02-30.
Day parse_iso_date(std::string_view text);
std::string format_iso_date(Day day);

int days_between(Day from, Day to);
int year_of(Day day);

}  // namespace citedyn
