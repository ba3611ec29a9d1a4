#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace stackcast {

using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);

// Accepts "YYYY-MM-DD", optionally followed by a time part ("T...").
Date parse_date(std::string_view text);
std::string format_date(Date d);

int year_of(Date d);
unsigned month_of(Date d);

// The Friday that closes the Saturday..Friday week containing d.
Date week_ending_friday(Date d);

Date end_of_year(int year);
Date end_of_month(int year, unsigned month);

// Calendar span in years of 365.25 days.
double years_between(Date from, Date to);

bool is_weekday(Date d);

}  // namespace stackcast
