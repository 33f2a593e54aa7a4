#pragma once

// NHTSA vPIC batch VIN decoding with a per-VIN fixture cache. Offline mode
// serves only from the cache and never touches the transport.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adas/datasets.hpp"
#include "adas/feature_catalog.hpp"

namespace adas::vpic {

inline constexpr std::string_view kDefaultUrl =
    "https://vpic.nhtsa.dot.gov/api/vehicles/DecodeVINValuesBatch/";
inline constexpr const char* kUrlEnvVar = "ADAS_VPIC_URL";

/// kUrlEnvVar when set and non-empty, else kDefaultUrl.
std::string default_url();

enum class VpicErrc { NetworkError, MalformedResponse };

class VpicError : public std::runtime_error {
 public:
  VpicError(VpicErrc code, const std::string& message) : std::runtime_error(message), code_(code) {}
  VpicErrc code() const noexcept { return code_; }

 private:
  VpicErrc code_;
};

/// vPIC variable name -> features. One variable may feed several features.
class VariableMap {
 public:
  static VariableMap load(const std::filesystem::path& path);
  static VariableMap load(std::istream& in);
  /// data/vpic_variables.csv from the source tree.
  static VariableMap bundled();

  std::span<const FeatureId> lookup(std::string_view variable) const noexcept;
  std::size_t size() const noexcept { return map_.size(); }

 private:
  std::map<std::string, std::vector<FeatureId>, std::less<>> map_;
};

struct VpicRecord {
  std::string vin;
  std::string make;
  std::string model;
  int model_year = 0;  // 0 when unknown
  FeatureFlags feature_flags;
  std::optional<std::string> error_text;  // unset for a clean decode (ErrorCode 0)
  /// False when the VIN's position-10 year disagrees with the decoded one.
  bool model_year_consistent = true;

  bool operator==(const VpicRecord&) const = default;
};

/// Stable JSON rendering used for idempotence checks and CLI output.
std::string to_json(const VpicRecord& record);

using RawFields = std::vector<std::pair<std::string, std::string>>;

/// Maps per-variable (name, value) pairs onto a record. Values "Standard",
/// "Optional" and "Not Available" map directly; an empty or absent value is
/// Unknown below the coverage floor and NotAvailable from it on. Throws
/// VpicError(MalformedResponse) without a VIN echo or a numeric model year.
VpicRecord normalize_vpic_record(const RawFields& fields, const VariableMap& variables,
                                 int coverage_floor = kDefaultCoverageFloor);

enum class CacheMode { Offline, RecordThenReplay, LiveOnly };

std::string_view to_string(CacheMode mode) noexcept;
std::optional<CacheMode> parse_cache_mode(std::string_view text) noexcept;

/// Directory of `<vin>.json` documents, each one flat vPIC result object.
class FixtureCache {
 public:
  FixtureCache(std::filesystem::path dir, CacheMode mode) : dir_(std::move(dir)), mode_(mode) {}

  CacheMode mode() const noexcept { return mode_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Raw JSON text for a VIN, or nullopt on a miss.
  std::optional<std::string> load(std::string_view vin) const;
  void store(std::string_view vin, const std::string& json) const;

 private:
  std::filesystem::path dir_;
  CacheMode mode_;
  mutable std::mutex write_mutex_;
};

/// One HTTP POST. Implementations throw TransportError on failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string& url, const std::string& body) = 0;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// cpp-httplib transport (http and https).
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(60)) : timeout_(timeout) {}
  std::string post(const std::string& url, const std::string& body) override;

  /// Requests attempted by every HttpTransport in this process.
  static std::size_t total_calls() noexcept { return total_calls_.load(); }

 private:
  std::chrono::seconds timeout_;
  static inline std::atomic<std::size_t> total_calls_{0};
};

struct RequestLimits {
  std::size_t batch_size = 50;
  std::size_t max_in_flight = 2;
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};  // doubles after each failed attempt
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

/// ceil(vin_count / batch_size).
constexpr std::size_t batch_count(std::size_t vin_count, std::size_t batch_size) {
  return batch_size == 0 ? 0 : (vin_count + batch_size - 1) / batch_size;
}

/// `DATA=<vin>;<vin>;...&format=json`
std::string batch_body(std::span<const std::string> vins);

class Client {
 public:
  Client(Transport& transport, VariableMap variables, std::string url = default_url(),
         int coverage_floor = kDefaultCoverageFloor)
      : transport_(transport),
        variables_(std::move(variables)),
        url_(std::move(url)),
        coverage_floor_(coverage_floor) {}

  /// One record per input VIN, in input order. The cache is consulted first
  /// (except in LiveOnly mode); Offline misses carry error_text "cache miss".
  /// VINs failing a lenient parse are never sent. Throws
  /// VpicError(NetworkError) only in LiveOnly mode, after retries.
  std::vector<VpicRecord> batch_decode(std::span<const std::string> vins, const FixtureCache& cache,
                                       const RequestLimits& limits = {});

  const std::string& url() const noexcept { return url_; }

 private:
  std::string post_with_retry(const std::string& body, const RequestLimits& limits);

  Transport& transport_;
  VariableMap variables_;
  std::string url_;
  int coverage_floor_;
};

/// Identity lookup over decoded records for FARS ingestion.
VehicleResolver make_resolver(std::vector<VpicRecord> records);

/// Catalog rows from decoded records, merged trim-agnostically per
/// make/model/year/feature. Unknown flags are skipped.
std::vector<TrimAvailabilityRecord> catalog_rows(std::span<const VpicRecord> records);

}  // namespace adas::vpic
