#include "adas/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iomanip>

#include "adas/errors.hpp"

namespace adas {

using nlohmann::ordered_json;

std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept {
  if (text == "table") return OutputFormat::Table;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  return std::nullopt;
}

namespace {

std::string join_cautions(std::span<const CautionFlag> cautions) {
  std::string out;
  for (const auto& c : cautions) {
    if (!out.empty()) out += ';';
    out += to_string(c);
  }
  return out;
}

std::string percent(int value) { return std::to_string(value) + "%"; }

std::string pp(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", value);
  // "-0.0" / "+0.0" both read as 0.0
  if (std::string_view(buf) == "-0.0" || std::string_view(buf) == "+0.0") return "0.0";
  return buf;
}

std::string one_decimal(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

void render_estimate_table(std::ostream& out, std::span<const PenetrationEstimate> rows) {
  // One footnote per distinct caution set.
  std::vector<std::string> notes;
  auto marker_for = [&notes](const std::string& note) {
    auto it = std::find(notes.begin(), notes.end(), note);
    if (it == notes.end()) {
      notes.push_back(note);
      it = notes.end() - 1;
    }
    return "[" + std::to_string(it - notes.begin() + 1) + "]";
  };

  const int year = rows.empty() ? 0 : rows.front().year;
  out << "Estimated " << year << " market penetration\n\n";
  out << std::left << std::setw(40) << "Technology" << std::right << std::setw(10) << "Equipped"
      << std::setw(4) << "" << std::setw(10) << "Activated" << std::setw(4) << "" << std::setw(10)
      << "Of fleet" << "  Basis\n";
  out << std::string(100, '-') << '\n';
  for (const auto& row : rows) {
    std::string basis = to_string(row.equipped_provenance);
    std::string mark;
    if (!row.cautions.empty()) mark = marker_for(join_cautions(row.cautions));
    const char* assumed = row.activation_source == ActivationSource::AssumedFromSimilar ? "*" : "";
    out << std::left << std::setw(40) << display_name(row.feature) << std::right << std::setw(10)
        << percent(row.equipped_pct) << std::left << std::setw(4) << mark << std::right << std::setw(10)
        << percent(row.activation_pct) << std::left << std::setw(4) << assumed << std::right
        << std::setw(10) << percent(row.activated_of_fleet_pct) << "  " << basis << '\n';
  }
  bool any_assumed = std::any_of(rows.begin(), rows.end(), [](const auto& r) {
    return r.activation_source == ActivationSource::AssumedFromSimilar;
  });
  if (any_assumed || !notes.empty()) out << '\n';
  if (any_assumed) out << "*  activation assumed same as a similar technology\n";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    out << "[" << i + 1 << "] caution: " << notes[i] << '\n';
  }
}

}  // namespace

void render_estimates(std::ostream& out, std::span<const PenetrationEstimate> rows, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table:
      render_estimate_table(out, rows);
      return;
    case OutputFormat::Csv:
      out << "feature,year,equipped_pct,activation_pct,activated_of_fleet_pct,provenance,analog,"
             "lag_years,activation_source,activation_donor,cautions\n";
      for (const auto& r : rows) {
        const auto& p = r.equipped_provenance;
        out << to_string(r.feature) << ',' << r.year << ',' << r.equipped_pct << ','
            << r.activation_pct << ',' << r.activated_of_fleet_pct << ',' << to_string(p.kind) << ','
            << (p.analog ? to_string(*p.analog) : "") << ',' << (p.analog ? std::to_string(p.lag_years) : "")
            << ',' << to_string(r.activation_source) << ','
            << (r.activation_donor ? to_string(*r.activation_donor) : "") << ','
            << join_cautions(r.cautions) << '\n';
      }
      return;
    case OutputFormat::Json: {
      ordered_json arr = ordered_json::array();
      for (const auto& r : rows) {
        const auto& p = r.equipped_provenance;
        ordered_json cautions = ordered_json::array();
        for (const auto& c : r.cautions) {
          cautions.push_back({{"kind", caution_name(c.kind)}, {"value", c.value}});
        }
        arr.push_back({
            {"feature", to_string(r.feature)},
            {"year", r.year},
            {"equipped_pct", r.equipped_pct},
            {"activation_pct", r.activation_pct},
            {"activated_of_fleet_pct", r.activated_of_fleet_pct},
            {"provenance", to_string(p.kind)},
            {"analog", p.analog ? ordered_json(to_string(*p.analog)) : ordered_json(nullptr)},
            {"lag_years", p.analog ? ordered_json(p.lag_years) : ordered_json(nullptr)},
            {"activation_source", to_string(r.activation_source)},
            {"activation_donor",
             r.activation_donor ? ordered_json(to_string(*r.activation_donor)) : ordered_json(nullptr)},
            {"cautions", cautions},
        });
      }
      out << arr.dump(2) << '\n';
      return;
    }
  }
}

void render_forecast(std::ostream& out, const ForecastReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table:
      out << "Forecast error for " << report.year << " (predicted - estimated)\n\n";
      out << std::left << std::setw(40) << "Technology" << std::right << std::setw(12) << "Predicted"
          << std::setw(12) << "Estimated" << std::setw(12) << "Error pp" << '\n';
      out << std::string(76, '-') << '\n';
      for (const auto& r : report.rows) {
        out << std::left << std::setw(40) << display_name(r.feature) << std::right << std::setw(12)
            << r.predicted.to_string() << std::setw(12) << r.estimated.to_string() << std::setw(12)
            << pp(r.error_pp) << '\n';
      }
      out << "\nMean absolute error: " << one_decimal(report.mean_absolute_error_pp)
          << " pp\n";
      return;
    case OutputFormat::Csv:
      out << "feature,year,predicted,estimated,error_pp\n";
      for (const auto& r : report.rows) {
        out << to_string(r.feature) << ',' << report.year << ',' << r.predicted.to_string() << ','
            << r.estimated.to_string() << ',' << pp(r.error_pp) << '\n';
      }
      out << "mean_absolute_error," << report.year << ",,,"
          << one_decimal(report.mean_absolute_error_pp) << '\n';
      return;
    case OutputFormat::Json: {
      ordered_json rows = ordered_json::array();
      for (const auto& r : report.rows) {
        rows.push_back({{"feature", to_string(r.feature)},
                        {"predicted", r.predicted.to_double()},
                        {"estimated", r.estimated.to_double()},
                        {"error_pp", r.error_pp}});
      }
      ordered_json doc = {{"year", report.year},
                          {"rows", rows},
                          {"mean_absolute_error_pp", report.mean_absolute_error_pp}};
      out << doc.dump(2) << '\n';
      return;
    }
  }
}

// -- data directories ------------------------------------------------------------

DataDirs::DataDirs(std::optional<std::filesystem::path> user, std::filesystem::path bundled)
    : user_(std::move(user)), bundled_(std::move(bundled)) {}

std::filesystem::path DataDirs::default_bundled() {
  return std::filesystem::path(ADAS_BUNDLED_DATA_DIR) / "bundled";
}

std::optional<std::filesystem::path> DataDirs::find(std::string_view file) const {
  if (user_) {
    auto p = *user_ / file;
    if (std::filesystem::exists(p)) return p;
  }
  auto p = bundled_ / file;
  if (std::filesystem::exists(p)) return p;
  return std::nullopt;
}

std::filesystem::path DataDirs::resolve(std::string_view file) const {
  if (auto p = find(file)) return *p;
  std::string where = bundled_.string();
  if (user_) where = user_->string() + " or " + where;
  throw DataError(DataErrc::SchemaError, "required file " + std::string(file) + " not found in " + where);
}

LoadedInputs load_inputs(const DataDirs& dirs, const IngestOptions& options) {
  LoadedInputs loaded;
  loaded.inputs.adoption = ingest_adoption_csv(dirs.resolve(kAdoptionFile), options);
  loaded.inputs.fleet = ingest_fleet_csv(dirs.resolve(kFleetFile), options);
  loaded.inputs.activation = ingest_activation_csv(dirs.resolve(kActivationFile));
  if (const auto cat = dirs.find(kCatalogFile)) loaded.catalog = Catalog::load(*cat);
  if (const auto fars = dirs.find(kFarsFile)) {
    auto result = ingest_fars_csv(*fars, loaded.catalog);
    loaded.inputs.fars = std::move(result.records);
    loaded.fars_warnings = result.warning_rows;
  }
  return loaded;
}

}  // namespace adas
