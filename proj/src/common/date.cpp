#include "stackcast/common/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace stackcast {

using namespace std::chrono;

Date make_date(int y, unsigned m, unsigned d) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date " + std::to_string(y) + "-" +
                                    std::to_string(m) + "-" + std::to_string(d));
    }
    return sys_days{ymd};
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::string_view whole) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("malformed date '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-' ||
        (text.size() > 10 && text[10] != 'T' && text[10] != ' ')) {
        throw std::invalid_argument("malformed date '" + std::string(text) + "'");
    }
    const int y = parse_field<int>(text.substr(0, 4), text);
    const auto m = parse_field<unsigned>(text.substr(5, 2), text);
    const auto d = parse_field<unsigned>(text.substr(8, 2), text);
    return make_date(y, m, d);
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

int year_of(Date d) { return int(year_month_day{d}.year()); }

unsigned month_of(Date d) { return unsigned(year_month_day{d}.month()); }

Date week_ending_friday(Date d) {
    const unsigned wd = weekday{d}.c_encoding();  // Sunday = 0
    return d + days{(5 + 7 - wd) % 7};
}

Date end_of_year(int y) { return make_date(y, 12, 31); }

Date end_of_month(int y, unsigned m) {
    return sys_days{year_month_day_last{year{y} / month{m} / last}};
}

double years_between(Date from, Date to) {
    return double((to - from).count()) / 365.25;
}

bool is_weekday(Date d) {
    const unsigned wd = weekday{d}.c_encoding();
    return wd != 0 && wd != 6;
}

}  // namespace stackcast
