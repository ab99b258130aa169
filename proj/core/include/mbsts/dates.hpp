#ifndef MBSTS_DATES_HPP_
#define MBSTS_DATES_HPP_

#include <compare>
#include <string>

namespace mbsts {

// Minimal civil date. Conversions use the days-from-civil algorithm; no
// locale or timezone involvement.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(const std::string& iso);  // "YYYY-MM-DD"
  static Date from_days(long days);           // days since 1970-01-01
  long to_days() const;
  Date plus_days(long n) const { return from_days(to_days() + n); }
  std::string to_string() const;
  bool valid() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

}  // namespace mbsts

#endif  // MBSTS_DATES_HPP_
