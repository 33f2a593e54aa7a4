#include "adas/vin.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <string_view>

namespace adas {

VinError::VinError(VinErrc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

VinError VinError::check_digit_mismatch(char expected, char found) {
  VinError e(VinErrc::CheckDigitMismatch,
             std::string("check digit mismatch: expected '") + expected + "', found '" + found + "'");
  e.expected_ = expected;
  e.found_ = found;
  return e;
}

const char* to_string(VinErrc code) noexcept {
  switch (code) {
    case VinErrc::WrongLength: return "WrongLength";
    case VinErrc::ForbiddenCharacter: return "ForbiddenCharacter";
    case VinErrc::CheckDigitMismatch: return "CheckDigitMismatch";
    case VinErrc::IllegalYearCode: return "IllegalYearCode";
  }
  return "unknown";
}

ModelYear::ModelYear(int year) : year_(year) {
  if (year < kFirst || year > kLast) {
    throw std::out_of_range("model year " + std::to_string(year) + " outside 1980-2039");
  }
}

namespace {

// -1 marks I, O, Q and non-alphanumerics.
constexpr std::array<std::int8_t, 256> kTransliteration = [] {
  std::array<std::int8_t, 256> t{};
  t.fill(-1);
  for (char c = '0'; c <= '9'; ++c) t[static_cast<unsigned char>(c)] = static_cast<std::int8_t>(c - '0');
  constexpr std::string_view letters = "ABCDEFGHJKLMNPRSTUVWXYZ";
  constexpr std::array<std::int8_t, 23> values = {1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4, 5, 7, 9, 2, 3, 4, 5, 6, 7, 8, 9};
  for (std::size_t i = 0; i < letters.size(); ++i) t[static_cast<unsigned char>(letters[i])] = values[i];
  return t;
}();

}  // namespace

std::optional<int> transliterate(char c) noexcept {
  const int v = kTransliteration[static_cast<unsigned char>(c)];
  if (v < 0) return std::nullopt;
  return v;
}

bool is_legal_vin_char(char c) noexcept { return transliterate(c).has_value(); }

namespace {

void require_shape(std::string_view text) {
  if (text.size() != kVinLength) {
    throw VinError(VinErrc::WrongLength,
                   "VIN must be 17 characters, got " + std::to_string(text.size()));
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_legal_vin_char(text[i])) {
      throw VinError(VinErrc::ForbiddenCharacter, std::string("illegal character '") + text[i] +
                                                      "' at position " + std::to_string(i + 1));
    }
  }
}

}  // namespace

char compute_check_digit(std::string_view text) {
  require_shape(text);
  int sum = 0;
  for (std::size_t i = 0; i < kVinLength; ++i) {
    sum += *transliterate(text[i]) * kVinWeights[i];
  }
  const int rem = sum % 11;
  return rem == 10 ? 'X' : static_cast<char>('0' + rem);
}

ModelYear decode_model_year(char year_code, char position7) {
  const auto idx = kYearCodes.find(year_code);
  if (idx == std::string_view::npos) {
    throw VinError(VinErrc::IllegalYearCode, std::string("illegal model-year code '") + year_code + "'");
  }
  const bool late_cycle = std::isalpha(static_cast<unsigned char>(position7)) != 0;
  return ModelYear((late_cycle ? 2010 : 1980) + static_cast<int>(idx));
}

std::pair<char, bool> encode_model_year(ModelYear year) noexcept {
  const int y = year.value();
  const bool late_cycle = y >= 2010;
  return {kYearCodes[static_cast<std::size_t>(y - (late_cycle ? 2010 : 1980))], late_cycle};
}

std::optional<ModelYear> Vin::model_year() const noexcept {
  try {
    return decode_model_year(year_code(), raw_[6]);
  } catch (const VinError&) {
    return std::nullopt;
  }
}

Vin parse_vin(std::string_view text, VinParseMode mode) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  require_shape(upper);

  const char found = upper[kCheckDigitIndex];
  const char expected = compute_check_digit(upper);
  if (found != expected && mode == VinParseMode::Strict) {
    throw VinError::check_digit_mismatch(expected, found);
  }
  return Vin(std::move(upper), expected);
}

}  // namespace adas
