#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factorlab {

/// Calendar date stored as a day serial (days since 1970-01-01).
class Date {
 public:
  constexpr Date() = default;
  explicit Date(std::chrono::sys_days d) : serial_(d.time_since_epoch().count()) {}
  explicit Date(std::chrono::year_month_day ymd) : Date(std::chrono::sys_days{ymd}) {}
  Date(int y, unsigned m, unsigned d)
      : Date(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                         std::chrono::day{d}}) {}

  /// Strict YYYY-MM-DD.
  static std::optional<Date> try_parse(std::string_view iso);
  static Date parse(std::string_view iso);

  std::string iso() const;
  std::chrono::year_month_day ymd() const {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{serial_}}};
  }
  int serial() const { return serial_; }
  unsigned weekday() const {
    return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{serial_}}}.c_encoding();
  }
  /// year*12 + month-1; equal for dates in the same calendar month.
  int month_key() const;

  Date plus_days(int n) const {
    Date d = *this;
    d.serial_ += n;
    return d;
  }

  auto operator<=>(const Date&) const = default;

 private:
  int serial_ = 0;
};

/// Monday-to-Friday calendar of `n` days starting at the first weekday >= start.
std::vector<Date> weekday_calendar(Date start, std::size_t n);

}  // namespace factorlab
