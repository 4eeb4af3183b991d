#include "support/money.hpp"

#include <cctype>
#include <cstdlib>

#include "support/error.hpp"

namespace deckhand {

Money Money::from_decimal_string(const std::string& text) {
  const char* p = text.c_str();
  bool negative = false;
  if (*p == '-') {
    negative = true;
    ++p;
  }
  if (!std::isdigit(static_cast<unsigned char>(*p)))
    raise(Errc::config_error, "bad decimal amount '" + text + "'");
  std::int64_t whole = 0;
  while (std::isdigit(static_cast<unsigned char>(*p))) {
    whole = whole * 10 + (*p - '0');
    ++p;
  }
  std::int64_t frac = 0;
  int frac_digits = 0;
  if (*p == '.') {
    ++p;
    while (std::isdigit(static_cast<unsigned char>(*p))) {
      if (frac_digits < 12) {
        frac = frac * 10 + (*p - '0');
        ++frac_digits;
      } else if (*p != '0') {
        raise(Errc::config_error,
              "amount '" + text + "' has more than 12 fractional digits");
      }
      ++p;
    }
  }
  if (*p != '\0')
    raise(Errc::config_error, "bad decimal amount '" + text + "'");
  for (; frac_digits < 12; ++frac_digits) frac *= 10;
  std::int64_t pd = whole * 1'000'000'000'000 + frac;
  return Money::from_picodollars(negative ? -pd : pd);
}

std::string Money::to_string() const {
  std::int64_t pd = pd_;
  std::string sign;
  if (pd < 0) {
    sign = "-";
    pd = -pd;
  }
  std::int64_t whole = pd / 1'000'000'000'000;
  std::int64_t frac = pd % 1'000'000'000'000;
  std::string out = sign + std::to_string(whole);
  if (frac != 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%012lld", static_cast<long long>(frac));
    std::string digits(buf);
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

}  // namespace deckhand
