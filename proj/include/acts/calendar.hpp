#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace acts {

/// Calendar day with day-granularity arithmetic.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses ISO-8601 (2020-08-30) or US style (8/30/20, 8/30/2020).
    static std::optional<Date> parse(std::string_view text);
    static Date parse_or_throw(std::string_view text);

    std::string iso() const;

    Date operator+(long days) const { return Date(days_ + std::chrono::days(days)); }
    Date operator-(long days) const { return Date(days_ - std::chrono::days(days)); }
    long operator-(const Date& other) const { return (days_ - other.days_).count(); }
    auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace acts
