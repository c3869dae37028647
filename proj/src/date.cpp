#include "factorlab/date.hpp"

#include "factorlab/common.hpp"

#include <charconv>

#include <fmt/format.h>

namespace factorlab {

namespace {

bool parse_digits(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::try_parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(iso.substr(0, 4), y) || !parse_digits(iso.substr(5, 2), m) ||
      !parse_digits(iso.substr(8, 2), d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

Date Date::parse(std::string_view iso) {
  auto d = try_parse(iso);
  if (!d) throw Error(fmt::format("invalid ISO date '{}'", iso));
  return *d;
}

std::string Date::iso() const {
  const auto v = ymd();
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(v.year()),
                     static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
}

int Date::month_key() const {
  const auto v = ymd();
  return static_cast<int>(v.year()) * 12 + static_cast<int>(static_cast<unsigned>(v.month())) - 1;
}

std::vector<Date> weekday_calendar(Date start, std::size_t n) {
  std::vector<Date> out;
  out.reserve(n);
  Date d = start;
  while (out.size() < n) {
    const unsigned wd = d.weekday();
    if (wd != 0 && wd != 6) out.push_back(d);
    d = d.plus_days(1);
  }
  return out;
}

}  // namespace factorlab
