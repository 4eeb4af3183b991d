#pragma once

#include <cstdint>
#include <string>

namespace deckhand {

// USD amount held as an integer count of picodollars (1e-12 USD), so that
// per-token API prices quoted to a few decimal places, and sums over many
// calls, stay exact. Double conversion happens only at report boundaries.
class Money {
 public:
  Money() = default;

  static Money from_picodollars(std::int64_t pd) { return Money(pd); }
  // Parses a decimal string such as "0.15" or "12.5"; at most 12 fractional
  // digits. Throws ConfigError on anything else.
  static Money from_decimal_string(const std::string& text);
  static Money zero() { return Money(0); }

  std::int64_t picodollars() const { return pd_; }
  double usd() const { return static_cast<double>(pd_) * 1e-12; }

  // Canonical decimal rendering, e.g. "0.75", "0.038", "0", "-1.2".
  std::string to_string() const;

  Money& operator+=(Money other) {
    pd_ += other.pd_;
    return *this;
  }
  friend Money operator+(Money a, Money b) { return Money(a.pd_ + b.pd_); }
  friend Money operator*(Money a, std::int64_t n) { return Money(a.pd_ * n); }
  friend auto operator<=>(Money, Money) = default;

 private:
  explicit Money(std::int64_t pd) : pd_(pd) {}
  std::int64_t pd_ = 0;
};

}  // namespace deckhand
