// adas: decode VINs, validate input files, estimate fleet penetration and
// score forecasts.
//
// Exit codes: 0 success, 1 data or validation failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "adas/csv.hpp"
#include "adas/datasets.hpp"
#include "adas/errors.hpp"
#include "adas/estimator.hpp"
#include "adas/feature_catalog.hpp"
#include "adas/report.hpp"
#include "adas/vin.hpp"
#include "adas/vpic_client.hpp"

namespace {

using namespace adas;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<std::string> data_dir;
  std::string format = "table";
  bool strict_vin = false;
  std::string vpic_mode = "offline";
  std::string vpic_url = vpic::default_url();
  std::optional<std::string> vpic_cache;
  bool require_contiguous = false;

  int max_lag = MatchConfig{}.max_lag;
  int min_overlap = MatchConfig{}.min_overlap;
  int long_lag = MatchConfig{}.long_lag_threshold;
  double divergence_pp = static_cast<double>(MatchConfig{}.optional_divergence_bp) / 100.0;
  int small_overlap = MatchConfig{}.small_overlap_threshold;
  int fars_offset = EstimatorConfig{}.fars_model_year_offset;

  OutputFormat output_format() const { return *parse_output_format(format); }
  DataDirs dirs() const {
    if (!data_dir) return DataDirs{};
    if (!std::filesystem::is_directory(*data_dir)) {
      throw UsageError("--data-dir " + *data_dir + " is not a directory");
    }
    return DataDirs{std::filesystem::path(*data_dir)};
  }
  IngestOptions ingest_options() const { return {require_contiguous}; }
  EstimatorConfig estimator_config() const {
    EstimatorConfig config;
    config.match.max_lag = max_lag;
    config.match.min_overlap = min_overlap;
    config.match.long_lag_threshold = long_lag;
    config.match.optional_divergence_bp = static_cast<std::int64_t>(divergence_pp * 100.0 + 0.5);
    config.match.small_overlap_threshold = small_overlap;
    config.fars_model_year_offset = fars_offset;
    return config;
  }
};

// -- decode ------------------------------------------------------------------------

struct DecodeRow {
  std::string input;
  std::string status;  // ok | check_digit_warning | error
  std::string message;
  std::optional<int> model_year;
  std::optional<vpic::VpicRecord> vpic;
};

std::vector<std::string> read_vin_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  const auto table = csv::read(in, path);
  std::vector<std::string> vins;
  const int col = table.column("vin");
  if (col < 0) {
    // Headerless: one VIN per line in the first field.
    if (!table.header.empty()) vins.emplace_back(csv::trim(table.header.front()));
    for (const auto& row : table.rows) vins.emplace_back(csv::trim(row.fields.front()));
  } else {
    for (const auto& row : table.rows) vins.emplace_back(csv::trim(row.fields[col]));
  }
  return vins;
}

vpic::VariableMap variable_map(const RunConfig& config) {
  if (config.data_dir) {
    const auto user = std::filesystem::path(*config.data_dir) / "vpic_variables.csv";
    if (std::filesystem::exists(user)) return vpic::VariableMap::load(user);
  }
  return vpic::VariableMap::bundled();
}

void render_decode(std::ostream& out, const std::vector<DecodeRow>& rows, OutputFormat format,
                   bool with_vpic) {
  auto availability = [](const DecodeRow& r, FeatureId f) -> std::string {
    if (!r.vpic || r.vpic->error_text) return "";
    return std::string(to_string(r.vpic->feature_flags[f]));
  };
  switch (format) {
    case OutputFormat::Table: {
      for (const auto& r : rows) {
        out << r.input << "  " << r.status;
        if (r.model_year) out << "  model_year=" << *r.model_year;
        if (!r.message.empty()) out << "  (" << r.message << ")";
        out << '\n';
        if (with_vpic && r.vpic) {
          if (r.vpic->error_text) {
            out << "    vpic: " << *r.vpic->error_text << '\n';
            continue;
          }
          out << "    " << r.vpic->make << ' ' << r.vpic->model << ' ' << r.vpic->model_year << '\n';
          for (const auto f : kPriorityFeatures) {
            out << "    " << abbreviation(f) << ": " << availability(r, f) << '\n';
          }
        }
      }
      return;
    }
    case OutputFormat::Csv: {
      out << "vin,status,model_year,message";
      if (with_vpic) {
        out << ",make,model,vpic_model_year,vpic_error";
        for (const auto f : kPriorityFeatures) out << ',' << to_string(f);
      }
      out << '\n';
      for (const auto& r : rows) {
        std::string message = r.message;
        std::replace(message.begin(), message.end(), ',', ';');
        out << r.input << ',' << r.status << ',' << (r.model_year ? std::to_string(*r.model_year) : "")
            << ',' << message;
        if (with_vpic) {
          const bool ok = r.vpic && !r.vpic->error_text;
          std::string err = r.vpic && r.vpic->error_text ? *r.vpic->error_text : "";
          std::replace(err.begin(), err.end(), ',', ';');
          out << ',' << (ok ? r.vpic->make : "") << ',' << (ok ? r.vpic->model : "") << ','
              << (ok ? std::to_string(r.vpic->model_year) : "") << ',' << err;
          for (const auto f : kPriorityFeatures) out << ',' << availability(r, f);
        }
        out << '\n';
      }
      return;
    }
    case OutputFormat::Json: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json j = {{"vin", r.input}, {"status", r.status}};
        j["model_year"] = r.model_year ? nlohmann::ordered_json(*r.model_year) : nullptr;
        j["message"] = r.message;
        if (with_vpic && r.vpic) j["vpic"] = nlohmann::ordered_json::parse(vpic::to_json(*r.vpic));
        arr.push_back(std::move(j));
      }
      out << arr.dump(2) << '\n';
      return;
    }
  }
}

int cmd_decode(const RunConfig& config, std::vector<std::string> vins, const std::optional<std::string>& file) {
  if (file) {
    auto more = read_vin_file(*file);
    vins.insert(vins.end(), more.begin(), more.end());
  }
  if (vins.empty()) throw UsageError("decode: no VINs given (pass VINs or --file)");

  const auto mode = config.strict_vin ? VinParseMode::Strict : VinParseMode::Lenient;
  std::vector<DecodeRow> rows;
  bool any_failed = false;
  for (const auto& text : vins) {
    DecodeRow row{text, "ok", "", std::nullopt, std::nullopt};
    try {
      const auto vin = parse_vin(text, mode);
      if (const auto my = vin.model_year()) row.model_year = my->value();
      if (!vin.check_digit_valid()) {
        row.status = "check_digit_warning";
        row.message = std::string("check digit ") + vin.check_digit() + ", expected " +
                      vin.expected_check_digit();
      }
    } catch (const VinError& e) {
      row.status = "error";
      row.message = e.what();
      any_failed = true;
    }
    rows.push_back(std::move(row));
  }

  const auto cache_mode = *vpic::parse_cache_mode(config.vpic_mode);
  const bool with_vpic = config.vpic_cache.has_value() || cache_mode == vpic::CacheMode::LiveOnly;
  if (with_vpic) {
    if (cache_mode == vpic::CacheMode::RecordThenReplay && !config.vpic_cache) {
      throw UsageError("--vpic-mode record needs --vpic-cache");
    }
    vpic::HttpTransport transport;
    vpic::Client client(transport, variable_map(config), config.vpic_url);
    vpic::FixtureCache cache(config.vpic_cache.value_or("."), cache_mode);
    const auto records = client.batch_decode(vins, cache);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].vpic = records[i];
  }

  render_decode(std::cout, rows, config.output_format(), with_vpic);
  return any_failed ? kExitData : kExitOk;
}

// -- ingest ------------------------------------------------------------------------

int cmd_ingest(const RunConfig& config, const std::string& kind, const std::string& file) {
  const std::filesystem::path path(file);
  if (!std::filesystem::exists(path)) throw UsageError("no such file: " + file);
  const auto format = config.output_format();
  auto summary = [&](const std::string& text) {
    if (format == OutputFormat::Json) {
      std::cout << nlohmann::ordered_json{{"kind", kind}, {"file", file}, {"summary", text}}.dump(2) << '\n';
    } else {
      std::cout << kind << ": " << text << '\n';
    }
  };

  if (kind == "adoption") {
    const auto set = ingest_adoption_csv(path, config.ingest_options());
    if (format == OutputFormat::Csv) return write_adoption_csv(std::cout, set), kExitOk;
    std::size_t points = 0;
    for (const auto& [f, s] : set) points += s.points.size();
    summary(std::to_string(points) + " points, " + std::to_string(set.size()) + " features");
  } else if (kind == "fleet") {
    const auto set = ingest_fleet_csv(path, config.ingest_options());
    if (format == OutputFormat::Csv) return write_fleet_csv(std::cout, set), kExitOk;
    std::size_t points = 0;
    for (const auto& [f, s] : set) points += s.points.size();
    summary(std::to_string(points) + " points, " + std::to_string(set.size()) + " features");
  } else if (kind == "activation") {
    const auto table = ingest_activation_csv(path);
    if (format == OutputFormat::Csv) return write_activation_csv(std::cout, table), kExitOk;
    summary(std::to_string(table.entries().size()) + " features");
  } else if (kind == "catalog") {
    const auto catalog = Catalog::load(path);
    summary(std::to_string(catalog.size()) + " entries");
  } else if (kind == "fars") {
    const auto dirs = config.dirs();
    Catalog catalog;
    if (const auto cat = dirs.find(kCatalogFile)) catalog = Catalog::load(*cat);
    const auto result = ingest_fars_csv(path, catalog);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    summary(std::to_string(result.records.size()) + " records, " + std::to_string(result.warning_rows) +
            " with warnings");
  } else {
    throw UsageError("ingest: unknown kind '" + kind + "' (adoption, fleet, activation, catalog, fars)");
  }
  return kExitOk;
}

// -- estimate / report-forecast ------------------------------------------------------

int cmd_estimate(const RunConfig& config, int year) {
  const auto loaded = load_inputs(config.dirs(), config.ingest_options());
  if (loaded.fars_warnings > 0) {
    std::cerr << "warning: " << loaded.fars_warnings << " crash-vehicle rows could not be fully resolved\n";
  }
  const auto rows = estimate_table(year, loaded.inputs, config.estimator_config());
  render_estimates(std::cout, rows, config.output_format());
  return kExitOk;
}

int cmd_report_forecast(const RunConfig& config, const std::string& predicted, const std::string& estimated,
                        int year) {
  for (const auto& f : {predicted, estimated}) {
    if (!std::filesystem::exists(f)) throw UsageError("no such file: " + f);
  }
  const auto p = ingest_fleet_csv(std::filesystem::path(predicted), config.ingest_options());
  const auto e = ingest_fleet_csv(std::filesystem::path(estimated), config.ingest_options());
  render_forecast(std::cout, forecast_error(p, e, year), config.output_format());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADAS fleet penetration estimator"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  app.add_option("--data-dir", config.data_dir, "Directory whose files override the bundled data");
  app.add_option("--format", config.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_flag("--strict-vin", config.strict_vin, "Treat check-digit mismatches as errors");
  app.add_option("--vpic-mode", config.vpic_mode, "vPIC cache mode")
      ->check(CLI::IsMember({"offline", "record", "live"}));
  app.add_option("--vpic-url", config.vpic_url, "vPIC batch endpoint")->envname(vpic::kUrlEnvVar);
  app.add_option("--vpic-cache", config.vpic_cache, "Directory of <vin>.json vPIC responses");
  app.add_flag("--require-contiguous", config.require_contiguous, "Reject series with missing years");
  app.add_option("--max-lag", config.max_lag, "Largest lag searched")->check(CLI::NonNegativeNumber);
  app.add_option("--min-overlap", config.min_overlap, "Fewest overlapping years for a match")
      ->check(CLI::PositiveNumber);
  app.add_option("--long-lag", config.long_lag, "Flag lags above this many years");
  app.add_option("--divergence-pp", config.divergence_pp, "Flag optional-share gaps above this")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--small-overlap", config.small_overlap, "Flag overlaps below this many years");
  app.add_option("--fars-offset", config.fars_offset, "Crash cohort model year = year - offset");

  auto* decode = app.add_subcommand("decode", "Parse VINs and report model year and availability");
  std::vector<std::string> vins;
  std::optional<std::string> vin_file;
  decode->add_option("vins", vins, "VINs");
  decode->add_option("--file", vin_file, "File of VINs (a 'vin' column, or one per line)");

  auto* ingest = app.add_subcommand("ingest", "Validate an input file");
  std::string kind;
  std::string ingest_file;
  ingest->add_option("kind", kind, "adoption|fleet|activation|catalog|fars")->required();
  ingest->add_option("file", ingest_file, "Input file")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate equipped and activated fleet shares");
  int year = 0;
  estimate->add_option("--year", year, "Calendar year")->required();

  auto* forecast = app.add_subcommand("report-forecast", "Compare predicted with estimated fleet rates");
  std::string predicted;
  std::string estimated;
  int forecast_year = 0;
  forecast->add_option("predicted", predicted, "Predicted fleet csv")->required();
  forecast->add_option("estimated", estimated, "Estimated fleet csv")->required();
  forecast->add_option("--year", forecast_year, "Calendar year")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*decode) return cmd_decode(config, vins, vin_file);
    if (*ingest) return cmd_ingest(config, kind, ingest_file);
    if (*estimate) return cmd_estimate(config, year);
    if (*forecast) return cmd_report_forecast(config, predicted, estimated, forecast_year);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const vpic::VpicError& e) {
    std::cerr << "vpic error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
