#include "adas/fraction.hpp"

#include <cctype>
#include <stdexcept>

namespace adas {

Fraction Fraction::parse(std::string_view text) {
  const std::string original(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) {
    throw std::invalid_argument("not a decimal: '" + original + "'");
  }
  auto digits_only = [](std::string_view s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if (!digits_only(whole) || !digits_only(frac)) {
    throw std::invalid_argument("not a decimal: '" + original + "'");
  }
  while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
  if (frac.size() > 4) {
    throw std::invalid_argument("more than four decimal places: '" + original + "'");
  }
  if (whole.size() > 9) {
    throw std::invalid_argument("decimal too large: '" + original + "'");
  }

  std::int64_t bp = 0;
  for (char c : whole) bp = bp * 10 + (c - '0');
  bp *= kScale;
  std::int64_t place = kScale / 10;
  for (char c : frac) {
    bp += (c - '0') * place;
    place /= 10;
  }
  return Fraction(negative ? -bp : bp);
}

Fraction Fraction::from_ratio(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0 || numerator < 0) {
    throw std::invalid_argument("ratio requires numerator >= 0 and denominator > 0");
  }
  return Fraction(div_round_half_up(numerator * kScale, denominator));
}

int Fraction::percent_half_up() const noexcept {
  if (bp_ < 0) return -static_cast<int>(div_round_half_up(-bp_, 100));
  return static_cast<int>(div_round_half_up(bp_, 100));
}

std::string Fraction::to_string() const {
  const std::int64_t mag = bp_ < 0 ? -bp_ : bp_;
  std::string out = bp_ < 0 ? "-" : "";
  out += std::to_string(mag / kScale);
  std::int64_t rem = mag % kScale;
  if (rem != 0) {
    std::string digits = std::to_string(rem);
    digits.insert(0, 4 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

}  // namespace adas
