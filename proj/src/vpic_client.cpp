#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "adas/vpic_client.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "adas/csv.hpp"
#include "adas/errors.hpp"
#include "adas/vin.hpp"

namespace adas::vpic {

using nlohmann::json;

std::string default_url() {
  if (const char* env = std::getenv(kUrlEnvVar); env && *env) return env;
  return std::string(kDefaultUrl);
}

// -- variable map ------------------------------------------------------------

VariableMap VariableMap::load(std::istream& in) {
  const auto table = csv::read(in, "vpic_variables");
  const auto c_var = table.require_column("vpic_variable", "vpic_variables");
  const auto c_feature = table.require_column("feature", "vpic_variables");
  VariableMap out;
  for (const auto& row : table.rows) {
    const auto feature = parse_feature(row.fields[c_feature]);
    if (!feature) {
      throw DataError(DataErrc::BadEnumValue, "unknown feature '" + row.fields[c_feature] + "'", row.line);
    }
    auto& features = out.map_[row.fields[c_var]];
    if (std::find(features.begin(), features.end(), *feature) == features.end()) {
      features.push_back(*feature);
    }
  }
  return out;
}

VariableMap VariableMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrc::SchemaError, "cannot open " + path.string());
  return load(in);
}

VariableMap VariableMap::bundled() {
  return load(std::filesystem::path(ADAS_BUNDLED_DATA_DIR) / "vpic_variables.csv");
}

std::span<const FeatureId> VariableMap::lookup(std::string_view variable) const noexcept {
  const auto it = map_.find(variable);
  if (it == map_.end()) return {};
  return it->second;
}

// -- record normalization ------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<Availability> vpic_availability(std::string_view value) {
  const auto v = lower(csv::trim(value));
  if (v.empty()) return std::nullopt;
  if (v == "standard") return Availability::Standard;
  if (v == "optional") return Availability::Optional;
  if (v == "not available" || v == "not_available") return Availability::NotAvailable;
  return Availability::Unknown;
}

bool is_field(std::string_view name, std::string_view flat, std::string_view display) {
  return name == flat || name == display;
}

}  // namespace

VpicRecord normalize_vpic_record(const RawFields& fields, const VariableMap& variables,
                                 int coverage_floor) {
  VpicRecord rec;
  std::optional<int> year;
  std::array<std::optional<Availability>, kFeatureCount> seen{};
  std::optional<std::string> error_code;

  for (const auto& [name, value] : fields) {
    if (name == "VIN") {
      rec.vin = std::string(csv::trim(value));
    } else if (name == "Make") {
      rec.make = std::string(csv::trim(value));
    } else if (name == "Model") {
      rec.model = std::string(csv::trim(value));
    } else if (is_field(name, "ModelYear", "Model Year")) {
      const auto v = csv::trim(value);
      int y = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), y);
      if (!v.empty() && ec == std::errc{} && ptr == v.data() + v.size()) year = y;
    } else if (is_field(name, "ErrorText", "Error Text")) {
      if (const auto t = csv::trim(value); !t.empty()) rec.error_text = std::string(t);
    } else if (is_field(name, "ErrorCode", "Error Code")) {
      error_code = std::string(csv::trim(value));
    } else {
      const auto avail = vpic_availability(value);
      if (!avail) continue;
      for (const auto f : variables.lookup(name)) {
        auto& slot = seen[static_cast<std::size_t>(f)];
        if (!slot || *slot == Availability::Unknown) slot = *avail;
      }
    }
  }

  if (rec.vin.empty()) {
    throw VpicError(VpicErrc::MalformedResponse, "vPIC response has no VIN echo");
  }
  if (!year) {
    throw VpicError(VpicErrc::MalformedResponse, "vPIC response for " + rec.vin + " has no model year");
  }
  rec.model_year = *year;
  // The service always fills ErrorText; code 0 means a clean decode.
  const bool clean = error_code ? *error_code == "0"
                                : rec.error_text && rec.error_text->starts_with("0 ");
  if (clean) rec.error_text.reset();

  const auto absent = rec.model_year < coverage_floor ? Availability::Unknown : Availability::NotAvailable;
  for (const auto f : kAllFeatures) {
    const auto& slot = seen[static_cast<std::size_t>(f)];
    rec.feature_flags.set(f, slot ? *slot : absent);
  }

  try {
    const auto vin = parse_vin(rec.vin, VinParseMode::Lenient);
    if (const auto decoded = vin.model_year()) {
      rec.model_year_consistent = decoded->value() == rec.model_year;
    }
  } catch (const VinError&) {
  }
  return rec;
}

std::string to_json(const VpicRecord& record) {
  json flags = json::object();
  for (const auto f : kAllFeatures) {
    flags[std::string(to_string(f))] = std::string(to_string(record.feature_flags[f]));
  }
  json j = {
      {"vin", record.vin},
      {"make", record.make},
      {"model", record.model},
      {"model_year", record.model_year},
      {"model_year_consistent", record.model_year_consistent},
      {"feature_flags", flags},
      {"error_text", record.error_text ? json(*record.error_text) : json(nullptr)},
  };
  return j.dump();
}

std::string_view to_string(CacheMode mode) noexcept {
  switch (mode) {
    case CacheMode::Offline: return "offline";
    case CacheMode::RecordThenReplay: return "record";
    case CacheMode::LiveOnly: return "live";
  }
  return "offline";
}

std::optional<CacheMode> parse_cache_mode(std::string_view text) noexcept {
  if (text == "offline") return CacheMode::Offline;
  if (text == "record") return CacheMode::RecordThenReplay;
  if (text == "live") return CacheMode::LiveOnly;
  return std::nullopt;
}

// -- fixture cache -------------------------------------------------------------

std::optional<std::string> FixtureCache::load(std::string_view vin) const {
  std::ifstream in(dir_ / (std::string(vin) + ".json"));
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void FixtureCache::store(std::string_view vin, const std::string& text) const {
  std::lock_guard lock(write_mutex_);
  std::filesystem::create_directories(dir_);
  const auto final_path = dir_ / (std::string(vin) + ".json");
  const auto tmp_path = dir_ / (std::string(vin) + ".json.tmp");
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    out << text << '\n';
  }
  std::filesystem::rename(tmp_path, final_path);
}

// -- transport -----------------------------------------------------------------

std::string HttpTransport::post(const std::string& url, const std::string& body) {
  ++total_calls_;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("bad URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto res = client.Post(path, body, "application/x-www-form-urlencoded");
  if (!res) {
    throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("POST " + url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

// -- batch decoding ------------------------------------------------------------

std::string batch_body(std::span<const std::string> vins) {
  std::string body = "DATA=";
  for (std::size_t i = 0; i < vins.size(); ++i) {
    if (i) body += ';';
    body += vins[i];
  }
  body += "&format=json";
  return body;
}

namespace {

RawFields raw_fields(const json& object) {
  if (!object.is_object()) {
    throw VpicError(VpicErrc::MalformedResponse, "vPIC result is not a JSON object");
  }
  RawFields fields;
  for (const auto& [key, value] : object.items()) {
    if (value.is_string()) {
      fields.emplace_back(key, value.get<std::string>());
    } else if (value.is_number()) {
      fields.emplace_back(key, value.dump());
    } else if (value.is_null()) {
      fields.emplace_back(key, "");
    }
  }
  return fields;
}

VpicRecord failed_record(std::string vin, std::string error) {
  VpicRecord rec;
  rec.vin = std::move(vin);
  rec.error_text = std::move(error);
  return rec;
}

}  // namespace

std::string Client::post_with_retry(const std::string& body, const RequestLimits& limits) {
  auto delay = limits.base_delay;
  const int attempts = std::max(limits.max_attempts, 1);
  for (int attempt = 1;; ++attempt) {
    try {
      return transport_.post(url_, body);
    } catch (const TransportError& e) {
      if (attempt >= attempts) {
        throw VpicError(VpicErrc::NetworkError,
                        std::string(e.what()) + " (after " + std::to_string(attempts) + " attempts)");
      }
    }
    if (limits.sleep) {
      limits.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay *= 2;
  }
}

std::vector<VpicRecord> Client::batch_decode(std::span<const std::string> vins, const FixtureCache& cache,
                                             const RequestLimits& limits) {
  std::vector<std::optional<VpicRecord>> out(vins.size());
  std::vector<std::string> normalized(vins.size());
  std::vector<std::size_t> pending;

  for (std::size_t i = 0; i < vins.size(); ++i) {
    try {
      normalized[i] = std::string(parse_vin(vins[i], VinParseMode::Lenient).raw());
    } catch (const VinError& e) {
      out[i] = failed_record(vins[i], std::string("invalid VIN: ") + e.what());
      continue;
    }
    if (cache.mode() != CacheMode::LiveOnly) {
      if (const auto cached = cache.load(normalized[i])) {
        json doc;
        try {
          doc = json::parse(*cached);
        } catch (const json::parse_error& e) {
          throw VpicError(VpicErrc::MalformedResponse,
                          "cached document for " + normalized[i] + ": " + e.what());
        }
        out[i] = normalize_vpic_record(raw_fields(doc), variables_, coverage_floor_);
        continue;
      }
    }
    if (cache.mode() == CacheMode::Offline) {
      out[i] = failed_record(normalized[i], "cache miss");
      continue;
    }
    pending.push_back(i);
  }

  const std::size_t batch_size = std::max<std::size_t>(limits.batch_size, 1);
  const std::size_t batches = batch_count(pending.size(), batch_size);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto run_batch = [&](std::size_t b) {
    const auto begin = b * batch_size;
    const auto end = std::min(begin + batch_size, pending.size());
    std::vector<std::string> batch_vins;
    for (auto k = begin; k < end; ++k) batch_vins.push_back(normalized[pending[k]]);

    std::string response;
    try {
      response = post_with_retry(batch_body(batch_vins), limits);
    } catch (const VpicError& e) {
      if (cache.mode() == CacheMode::LiveOnly) throw;
      for (auto k = begin; k < end; ++k) {
        out[pending[k]] = failed_record(normalized[pending[k]], std::string("network error: ") + e.what());
      }
      return;
    }

    json doc;
    try {
      doc = json::parse(response);
    } catch (const json::parse_error& e) {
      throw VpicError(VpicErrc::MalformedResponse, std::string("batch response: ") + e.what());
    }
    if (!doc.contains("Results") || !doc["Results"].is_array()) {
      throw VpicError(VpicErrc::MalformedResponse, "batch response has no Results array");
    }
    // Results normally come back in request order; fall back to VIN echo.
    std::unordered_multimap<std::string, const json*> by_vin;
    for (const auto& r : doc["Results"]) {
      if (r.is_object() && r.contains("VIN") && r["VIN"].is_string()) {
        std::string echo = r["VIN"].get<std::string>();
        for (auto& c : echo) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        by_vin.emplace(std::move(echo), &r);
      }
    }
    for (auto k = begin; k < end; ++k) {
      const auto& vin = normalized[pending[k]];
      const auto it = by_vin.find(vin);
      if (it == by_vin.end()) {
        throw VpicError(VpicErrc::MalformedResponse, "batch response lacks " + vin);
      }
      const json& result = *it->second;
      by_vin.erase(it);
      out[pending[k]] = normalize_vpic_record(raw_fields(result), variables_, coverage_floor_);
      if (cache.mode() == CacheMode::RecordThenReplay) cache.store(vin, result.dump());
    }
  };

  auto worker = [&] {
    while (true) {
      const auto b = next.fetch_add(1);
      if (b >= batches) return;
      try {
        run_batch(b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(batches);
        return;
      }
    }
  };

  const auto threads = std::min(std::max<std::size_t>(limits.max_in_flight, 1), batches);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<VpicRecord> records;
  records.reserve(out.size());
  for (auto& r : out) records.push_back(std::move(*r));
  return records;
}

VehicleResolver make_resolver(std::vector<VpicRecord> records) {
  auto index = std::make_shared<std::map<std::string, VehicleIdentity, std::less<>>>();
  for (auto& r : records) {
    if (r.error_text && r.make.empty()) continue;
    index->emplace(r.vin, VehicleIdentity{r.make, r.model, r.model_year});
  }
  return [index](std::string_view vin) -> std::optional<VehicleIdentity> {
    const auto it = index->find(vin);
    if (it == index->end()) return std::nullopt;
    return it->second;
  };
}

std::vector<TrimAvailabilityRecord> catalog_rows(std::span<const VpicRecord> records) {
  // Trim-agnostic merge: Standard only if every decoded vehicle has it as
  // standard, Optional if any offers it, NotAvailable otherwise.
  using Key = std::tuple<std::string, std::string, int, FeatureId>;
  std::map<Key, Availability> merged;
  std::vector<Key> order;
  for (const auto& r : records) {
    if (r.make.empty() || r.model.empty() || r.model_year == 0) continue;
    for (const auto f : kAllFeatures) {
      const auto a = r.feature_flags[f];
      if (a == Availability::Unknown) continue;
      Key key{r.make, r.model, r.model_year, f};
      const auto [it, inserted] = merged.emplace(key, a);
      if (inserted) {
        order.push_back(std::move(key));
      } else if (it->second != a) {
        it->second = (is_offered(it->second) || is_offered(a)) ? Availability::Optional
                                                               : Availability::NotAvailable;
      }
    }
  }
  std::vector<TrimAvailabilityRecord> rows;
  rows.reserve(order.size());
  for (const auto& key : order) {
    const auto& [make, model, year, feature] = key;
    rows.push_back({make, model, year, feature, merged.at(key)});
  }
  return rows;
}

}  // namespace adas::vpic
