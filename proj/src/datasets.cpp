#include "adas/datasets.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "adas/csv.hpp"
#include "adas/errors.hpp"
#include "adas/kernels.hpp"
#include "adas/vin.hpp"

namespace adas {

const AdoptionPoint* AdoptionSeries::at(int model_year) const noexcept {
  const auto it = points.find(model_year);
  return it == points.end() ? nullptr : &it->second;
}

std::optional<Fraction> FleetSeries::at(int calendar_year) const noexcept {
  const auto it = points.find(calendar_year);
  if (it == points.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(ActivationSource s) noexcept {
  return s == ActivationSource::Observed ? "observed" : "assumed_from_similar";
}

const ActivationEntry* ActivationTable::find(FeatureId f) const noexcept {
  const auto it = entries_.find(f);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrc::SchemaError, "cannot open " + path.string());
  return in;
}

FeatureId feature_field(const std::string& text, std::size_t line) {
  const auto f = parse_feature(text);
  if (!f) throw DataError(DataErrc::BadEnumValue, "unknown feature '" + text + "'", line);
  return *f;
}

int int_field(const std::string& text, std::string_view what, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError(DataErrc::SchemaError, "bad " + std::string(what) + " '" + text + "'", line);
  }
  return value;
}

Fraction fraction_field(const std::string& text, std::string_view what, std::size_t line) {
  Fraction f;
  try {
    f = Fraction::parse(text);
  } catch (const std::invalid_argument& e) {
    throw DataError(DataErrc::SchemaError, "bad " + std::string(what) + ": " + e.what(), line);
  }
  if (!f.in_unit_interval()) {
    throw DataError(DataErrc::FractionOutOfRange,
                    std::string(what) + " " + text + " outside [0, 1]", line);
  }
  return f;
}

template <typename Points>
void check_contiguous(FeatureId feature, const Points& points) {
  if (points.empty()) return;
  const int first = points.begin()->first;
  const int last = points.rbegin()->first;
  if (static_cast<std::size_t>(last - first + 1) != points.size()) {
    throw DataError(DataErrc::NonContiguousYears,
                    std::string(to_string(feature)) + ": years " + std::to_string(first) + "-" +
                        std::to_string(last) + " have gaps");
  }
}

}  // namespace

AdoptionSet ingest_adoption_csv(std::istream& in, const IngestOptions& options) {
  const auto table = csv::read(in, "adoption");
  const auto c_feature = table.require_column("feature", "adoption");
  const auto c_year = table.require_column("model_year", "adoption");
  const auto c_std = table.require_column("std_frac", "adoption");
  const auto c_opt = table.require_column("opt_frac", "adoption");

  AdoptionSet set;
  for (const auto& row : table.rows) {
    const auto& f = row.fields;
    const auto feature = feature_field(f[c_feature], row.line);
    const int year = int_field(f[c_year], "model_year", row.line);
    AdoptionPoint point{fraction_field(f[c_std], "std_frac", row.line),
                        fraction_field(f[c_opt], "opt_frac", row.line)};
    if (!point.combined().in_unit_interval()) {
      throw DataError(DataErrc::FractionOutOfRange,
                      "std_frac + opt_frac = " + point.combined().to_string() + " exceeds 1", row.line);
    }
    auto& series = set[feature];
    series.feature = feature;
    if (!series.points.emplace(year, point).second) {
      throw DataError(DataErrc::DuplicateKey,
                      std::string(to_string(feature)) + " model year " + std::to_string(year) + " repeated",
                      row.line);
    }
  }
  if (options.require_contiguous) {
    for (const auto& [feature, series] : set) check_contiguous(feature, series.points);
  }
  return set;
}

AdoptionSet ingest_adoption_csv(const std::filesystem::path& path, const IngestOptions& options) {
  auto in = open(path);
  return ingest_adoption_csv(in, options);
}

FleetSet ingest_fleet_csv(std::istream& in, const IngestOptions& options) {
  const auto table = csv::read(in, "fleet");
  const auto c_feature = table.require_column("feature", "fleet");
  const auto c_year = table.require_column("calendar_year", "fleet");
  const auto c_frac = table.require_column("equipped_frac", "fleet");

  FleetSet set;
  for (const auto& row : table.rows) {
    const auto& f = row.fields;
    const auto feature = feature_field(f[c_feature], row.line);
    const int year = int_field(f[c_year], "calendar_year", row.line);
    const auto frac = fraction_field(f[c_frac], "equipped_frac", row.line);
    auto& series = set[feature];
    series.feature = feature;
    if (!series.points.emplace(year, frac).second) {
      throw DataError(DataErrc::DuplicateKey,
                      std::string(to_string(feature)) + " year " + std::to_string(year) + " repeated",
                      row.line);
    }
  }
  if (options.require_contiguous) {
    for (const auto& [feature, series] : set) check_contiguous(feature, series.points);
  }
  return set;
}

FleetSet ingest_fleet_csv(const std::filesystem::path& path, const IngestOptions& options) {
  auto in = open(path);
  return ingest_fleet_csv(in, options);
}

ActivationTable ingest_activation_csv(std::istream& in) {
  const auto table = csv::read(in, "activation");
  const auto c_feature = table.require_column("feature", "activation");
  const auto c_rate = table.require_column("rate", "activation");
  const auto c_source = table.require_column("source", "activation");
  const auto c_donor = table.require_column("donor", "activation");

  ActivationTable out;
  for (const auto& row : table.rows) {
    const auto& f = row.fields;
    const auto feature = feature_field(f[c_feature], row.line);
    if (out.find(feature)) {
      throw DataError(DataErrc::DuplicateKey,
                      std::string(to_string(feature)) + " listed twice", row.line);
    }
    ActivationEntry entry;
    entry.rate = fraction_field(f[c_rate], "rate", row.line);
    if (f[c_source] == "observed") {
      entry.source = ActivationSource::Observed;
      if (!f[c_donor].empty()) {
        throw DataError(DataErrc::SchemaError, "observed rates take no donor", row.line);
      }
    } else if (f[c_source] == "assumed_from_similar") {
      entry.source = ActivationSource::AssumedFromSimilar;
      if (f[c_donor].empty()) {
        throw DataError(DataErrc::SchemaError, "assumed rates must name a donor feature", row.line);
      }
      entry.donor = feature_field(f[c_donor], row.line);
    } else {
      throw DataError(DataErrc::BadEnumValue, "bad source '" + f[c_source] + "'", row.line);
    }
    out.set(feature, entry);
  }
  return out;
}

ActivationTable ingest_activation_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return ingest_activation_csv(in);
}

void write_adoption_csv(std::ostream& out, const AdoptionSet& set) {
  out << "feature,model_year,std_frac,opt_frac\n";
  for (const auto& [feature, series] : set) {
    for (const auto& [year, p] : series.points) {
      out << to_string(feature) << ',' << year << ',' << p.standard.to_string() << ','
          << p.optional.to_string() << '\n';
    }
  }
}

void write_fleet_csv(std::ostream& out, const FleetSet& set) {
  out << "feature,calendar_year,equipped_frac\n";
  for (const auto& [feature, series] : set) {
    for (const auto& [year, frac] : series.points) {
      out << to_string(feature) << ',' << year << ',' << frac.to_string() << '\n';
    }
  }
}

void write_activation_csv(std::ostream& out, const ActivationTable& table) {
  out << "feature,rate,source,donor\n";
  for (const auto& [feature, e] : table.entries()) {
    out << to_string(feature) << ',' << e.rate.to_string() << ',' << to_string(e.source) << ','
        << (e.donor ? to_string(*e.donor) : "") << '\n';
  }
}

// -- crash-vehicle extracts ----------------------------------------------------

FarsIngestResult ingest_fars_csv(std::istream& in, const Catalog& catalog,
                                 const VehicleResolver& resolver) {
  const auto table = csv::read(in, "fars");
  const auto c_vin = table.require_column("vin", "fars");
  const auto c_crash = table.require_column("crash_year", "fars");
  const int c_make = table.column("make");
  const int c_model = table.column("model");
  const int c_year = table.column("model_year");

  auto optional_field = [](const csv::Row& row, int col) -> std::string {
    return col < 0 ? std::string{} : row.fields[static_cast<std::size_t>(col)];
  };

  FarsIngestResult result;
  result.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ++result.input_rows;
    std::vector<std::string> problems;
    FarsVehicleRecord rec;
    rec.vin = row.fields[c_vin];

    try {
      rec.crash_year = int_field(row.fields[c_crash], "crash_year", row.line);
    } catch (const DataError& e) {
      problems.emplace_back(e.what());
    }

    std::optional<Vin> vin;
    try {
      vin = parse_vin(rec.vin, VinParseMode::Lenient);
      rec.vin = std::string(vin->raw());
      if (!vin->check_digit_valid()) {
        problems.push_back("check digit mismatch (expected '" +
                           std::string(1, vin->expected_check_digit()) + "')");
      }
    } catch (const VinError& e) {
      problems.push_back(std::string("unparseable VIN: ") + e.what());
    }

    std::string make = optional_field(row, c_make);
    std::string model = optional_field(row, c_model);
    if (const auto year_text = optional_field(row, c_year); !year_text.empty()) {
      try {
        rec.model_year = int_field(year_text, "model_year", row.line);
      } catch (const DataError& e) {
        problems.emplace_back(e.what());
      }
    }
    if (vin && (make.empty() || model.empty() || !rec.model_year) && resolver) {
      if (const auto id = resolver(vin->raw())) {
        if (make.empty()) make = id->make;
        if (model.empty()) model = id->model;
        if (!rec.model_year && id->model_year > 0) rec.model_year = id->model_year;
      }
    }
    if (!rec.model_year && vin) {
      if (const auto decoded = vin->model_year()) rec.model_year = decoded->value();
    }

    if (vin && rec.model_year && !make.empty() && !model.empty()) {
      for (const auto f : kAllFeatures) {
        rec.feature_flags.set(f, catalog.lookup(make, model, *rec.model_year, f));
      }
    } else if (vin) {
      problems.emplace_back("make/model/model year unresolved");
    }

    if (!problems.empty()) {
      ++result.warning_rows;
      for (const auto& p : problems) {
        result.warnings.push_back("line " + std::to_string(row.line) + ": " + p);
      }
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

FarsIngestResult ingest_fars_csv(const std::filesystem::path& path, const Catalog& catalog,
                                 const VehicleResolver& resolver) {
  auto in = open(path);
  return ingest_fars_csv(in, catalog, resolver);
}

double FarsFraction::std_frac() const noexcept {
  return n() == 0 ? 0.0 : static_cast<double>(counts.standard) / static_cast<double>(n());
}

double FarsFraction::opt_frac() const noexcept {
  return n() == 0 ? 0.0 : static_cast<double>(counts.optional) / static_cast<double>(n());
}

AdoptionPoint FarsFraction::as_adoption_point() const {
  const auto total = static_cast<std::int64_t>(n());
  return {Fraction::from_ratio(static_cast<std::int64_t>(counts.standard), total),
          Fraction::from_ratio(static_cast<std::int64_t>(counts.optional), total)};
}

FarsFraction fars_availability_fraction(std::span<const FarsVehicleRecord> records, FeatureId feature,
                                        int model_year) {
  FarsFraction out{kernels::count_availability_parallel(records, feature, model_year)};
  if (out.n() == 0) {
    throw DataError(DataErrc::EmptyCohort,
                    "no model year " + std::to_string(model_year) + " crash vehicles with known " +
                        std::string(to_string(feature)) + " availability");
  }
  return out;
}

AdoptionSet fars_adoption_series(std::span<const FarsVehicleRecord> records,
                                 std::span<const FeatureId> features, int model_year) {
  AdoptionSet out;
  for (const auto f : features) {
    const FarsFraction frac{kernels::count_availability_parallel(records, f, model_year)};
    if (frac.n() == 0) continue;
    out[f] = AdoptionSeries{f, {{model_year, frac.as_adoption_point()}}};
  }
  return out;
}

}  // namespace adas
