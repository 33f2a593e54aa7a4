#pragma once

// 17-character Vehicle Identification Numbers (49 CFR 565): structure,
// check digit, and model-year decoding.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace adas {

inline constexpr std::size_t kVinLength = 17;
inline constexpr std::size_t kCheckDigitIndex = 8;  // position 9
inline constexpr std::size_t kYearCodeIndex = 9;    // position 10

inline constexpr std::array<int, kVinLength> kVinWeights = {
    8, 7, 6, 5, 4, 3, 2, 10, 0, 9, 8, 7, 6, 5, 4, 3, 2};

/// The 30 model-year codes in cycle order; index 0 is 1980/2010.
inline constexpr std::string_view kYearCodes = "ABCDEFGHJKLMNPRSTVWXY123456789";

enum class VinErrc {
  WrongLength,
  ForbiddenCharacter,
  CheckDigitMismatch,
  IllegalYearCode,
};

class VinError : public std::runtime_error {
 public:
  VinError(VinErrc code, const std::string& message);
  static VinError check_digit_mismatch(char expected, char found);

  VinErrc code() const noexcept { return code_; }
  /// Set only for CheckDigitMismatch.
  char expected() const noexcept { return expected_; }
  char found() const noexcept { return found_; }

 private:
  VinErrc code_;
  char expected_ = 0;
  char found_ = 0;
};

const char* to_string(VinErrc code) noexcept;

class ModelYear {
 public:
  static constexpr int kFirst = 1980;
  static constexpr int kLast = 2039;

  /// Throws std::out_of_range outside [1980, 2039].
  explicit ModelYear(int year);

  int value() const noexcept { return year_; }
  auto operator<=>(const ModelYear&) const = default;

 private:
  int year_;
};

/// Transliterated value of a legal VIN character, or nullopt for I, O, Q and
/// anything outside [0-9A-Z].
std::optional<int> transliterate(char c) noexcept;
bool is_legal_vin_char(char c) noexcept;

/// Weighted-sum check digit ('0'-'9' or 'X'). Position 9 carries weight zero,
/// so its content does not affect the result.
char compute_check_digit(std::string_view text);

/// Position 7 alphabetic selects the 2010-2039 cycle, otherwise 1980-2009.
ModelYear decode_model_year(char year_code, char position7);

/// Inverse of decode_model_year: the year code plus whether position 7 must be
/// alphabetic to select the right cycle.
std::pair<char, bool> encode_model_year(ModelYear year) noexcept;

enum class VinParseMode { Strict, Lenient };

class Vin {
 public:
  std::string_view raw() const noexcept { return raw_; }
  std::string_view wmi() const noexcept { return std::string_view(raw_).substr(0, 3); }
  std::string_view vds() const noexcept { return std::string_view(raw_).substr(3, 5); }
  char check_digit() const noexcept { return raw_[kCheckDigitIndex]; }
  char year_code() const noexcept { return raw_[kYearCodeIndex]; }
  char plant_code() const noexcept { return raw_[10]; }
  std::string_view serial() const noexcept { return std::string_view(raw_).substr(11, 6); }

  bool check_digit_valid() const noexcept { return check_digit() == expected_check_digit_; }
  char expected_check_digit() const noexcept { return expected_check_digit_; }

  /// nullopt when position 10 is not a legal year code (U, Z, 0).
  std::optional<ModelYear> model_year() const noexcept;

  bool operator==(const Vin&) const = default;

 private:
  friend Vin parse_vin(std::string_view, VinParseMode);
  Vin(std::string raw, char expected) : raw_(std::move(raw)), expected_check_digit_(expected) {}

  std::string raw_;
  char expected_check_digit_;
};

/// Normalizes to uppercase, then validates length, alphabet and check digit.
/// Lenient mode returns a Vin whose check_digit_valid() is false instead of
/// throwing CheckDigitMismatch.
Vin parse_vin(std::string_view text, VinParseMode mode = VinParseMode::Strict);

}  // namespace adas
