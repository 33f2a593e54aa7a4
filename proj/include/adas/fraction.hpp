#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace adas {

/// Exact decimal fraction stored in basis points (1/10000), so two-digit
/// published percentages survive text round trips unchanged. Values are not
/// range-checked here; datasets reject anything outside [0, 1].
class Fraction {
 public:
  static constexpr std::int64_t kScale = 10000;

  constexpr Fraction() = default;
  static constexpr Fraction from_basis_points(std::int64_t bp) { return Fraction(bp); }

  /// Parses "0.15", ".5", "1", "0.1234". More than four significant decimal
  /// places throws std::invalid_argument (the value would not be exact).
  static Fraction parse(std::string_view text);

  /// numerator/denominator rounded half-up to the nearest basis point.
  static Fraction from_ratio(std::int64_t numerator, std::int64_t denominator);

  constexpr std::int64_t basis_points() const noexcept { return bp_; }
  double to_double() const noexcept { return static_cast<double>(bp_) / kScale; }
  bool in_unit_interval() const noexcept { return bp_ >= 0 && bp_ <= kScale; }

  /// Integer percent, half-up: 0.155 -> 16, 0.145 -> 15.
  int percent_half_up() const noexcept;

  /// Shortest decimal text that parses back to the same value ("0.15", "1", "0").
  std::string to_string() const;

  constexpr auto operator<=>(const Fraction&) const = default;
  constexpr Fraction operator+(Fraction o) const { return Fraction(bp_ + o.bp_); }
  constexpr Fraction operator-(Fraction o) const { return Fraction(bp_ - o.bp_); }

 private:
  constexpr explicit Fraction(std::int64_t bp) : bp_(bp) {}
  std::int64_t bp_ = 0;
};

/// Round-half-up of numerator/denominator for non-negative operands.
constexpr std::int64_t div_round_half_up(std::int64_t numerator, std::int64_t denominator) {
  return (2 * numerator + denominator) / (2 * denominator);
}

}  // namespace adas
