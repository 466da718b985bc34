#include "acts/calendar.hpp"

#include "acts/errors.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

namespace acts {

namespace {

std::optional<int> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::optional<Date> make(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days{ymd});
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}) {}

std::optional<Date> Date::parse(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r')) text.remove_suffix(1);
    if (text.find('-') != std::string_view::npos) {
        auto p = split(text, '-');
        if (p.size() != 3 || p[0].size() != 4) return std::nullopt;
        auto y = parse_int(p[0]), m = parse_int(p[1]), d = parse_int(p[2]);
        if (!y || !m || !d) return std::nullopt;
        return make(*y, *m, *d);
    }
    if (text.find('/') != std::string_view::npos) {
        auto p = split(text, '/');
        if (p.size() != 3) return std::nullopt;
        auto m = parse_int(p[0]), d = parse_int(p[1]), y = parse_int(p[2]);
        if (!y || !m || !d) return std::nullopt;
        int year = *y;
        if (p[2].size() == 2) year += 2000;
        else if (p[2].size() != 4) return std::nullopt;
        return make(year, *m, *d);
    }
    return std::nullopt;
}

Date Date::parse_or_throw(std::string_view text) {
    auto d = parse(text);
    if (!d) throw FormatError("invalid date '" + std::string(text) + "'");
    return *d;
}

std::string Date::iso() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace acts
