#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace vertisafe {

/// Exact time value stored as an integer number of ticks.
///
/// One time unit is 2000 ticks. Input values carry at most three decimal
/// places, so every parsed time (and every sum or difference of parsed times)
/// is an even tick count and the midpoint of two such values is exact.
class Time {
 public:
  static constexpr std::int64_t kTicksPerUnit = 2000;
  static constexpr int kInputDecimals = 3;

  constexpr Time() = default;

  static constexpr Time from_ticks(std::int64_t ticks) { return Time(ticks); }
  static constexpr Time units(std::int64_t whole) { return Time(whole * kTicksPerUnit); }
  static constexpr Time max() { return Time(std::numeric_limits<std::int64_t>::max() / 4); }

  constexpr std::int64_t ticks() const { return ticks_; }

  constexpr Time operator+(Time o) const { return Time(ticks_ + o.ticks_); }
  constexpr Time operator-(Time o) const { return Time(ticks_ - o.ticks_); }
  constexpr Time& operator+=(Time o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr Time& operator-=(Time o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  constexpr auto operator<=>(const Time&) const = default;

  /// Point halfway between two times; exact for input-derived values.
  static constexpr Time midpoint(Time a, Time b) {
    return Time(a.ticks_ + (b.ticks_ - a.ticks_) / 2);
  }

  /// Parses a decimal literal such as "12", "0.5" or "-3.125".
  static std::optional<Time> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    if (frac.size() > static_cast<std::size_t>(kInputDecimals)) return std::nullopt;
    std::int64_t w = 0;
    if (!whole.empty()) {
      auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
      if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
      if (w > std::numeric_limits<std::int64_t>::max() / (4 * kTicksPerUnit)) return std::nullopt;
    }
    std::int64_t f = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
      f = f * 10 + (c - '0');
    }
    for (std::size_t i = frac.size(); i < static_cast<std::size_t>(kInputDecimals); ++i) f *= 10;
    // 1/1000 of a unit is 2 ticks.
    std::int64_t ticks = w * kTicksPerUnit + f * (kTicksPerUnit / 1000);
    return Time(negative ? -ticks : ticks);
  }

  /// Shortest exact decimal rendering ("15", "2.5", "0.0005").
  std::string to_string() const {
    std::int64_t t = ticks_;
    std::string sign;
    if (t < 0) {
      sign = "-";
      t = -t;
    }
    std::string out = sign + std::to_string(t / kTicksPerUnit);
    // 1 tick = 0.0005 units, so four decimals are always exact.
    std::int64_t frac = (t % kTicksPerUnit) * 5;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, 4 - digits.size(), '0');
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += "." + digits;
    }
    return out;
  }

  double to_double() const { return static_cast<double>(ticks_) / kTicksPerUnit; }

  friend std::ostream& operator<<(std::ostream& os, Time t) { return os << t.to_string(); }

 private:
  constexpr explicit Time(std::int64_t ticks) : ticks_(ticks) {}
  std::int64_t ticks_ = 0;
};

/// Whether occupancy intervals include their right endpoint.
enum class OccupancySemantics { right_open, closed };

/// Interval [lo, hi] or [lo, hi); which one is decided by the caller.
struct TimeInterval {
  Time lo;
  Time hi;

  constexpr bool contains_closed(Time t) const { return lo <= t && t <= hi; }
  constexpr bool contains_right_open(Time t) const { return lo <= t && t < hi; }
  constexpr bool contains(Time t, OccupancySemantics s) const {
    return s == OccupancySemantics::right_open ? contains_right_open(t) : contains_closed(t);
  }
  constexpr Time width() const { return hi - lo; }
  constexpr bool operator==(const TimeInterval&) const = default;
};

}  // namespace vertisafe
