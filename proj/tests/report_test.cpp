#include "adas/report.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

#include "adas/csv.hpp"

namespace adas {
namespace {

std::vector<PenetrationEstimate> bundled_rows() {
  static const auto rows = estimate_table(2022, load_inputs(DataDirs{}).inputs);
  return rows;
}

std::string render(OutputFormat format) {
  std::ostringstream out;
  render_estimates(out, bundled_rows(), format);
  return out.str();
}

TEST(Report, CsvAndJsonCarryTheSameValues) {
  std::istringstream csv_in(render(OutputFormat::Csv));
  const auto table = csv::read(csv_in);
  const auto doc = nlohmann::json::parse(render(OutputFormat::Json));
  ASSERT_EQ(table.rows.size(), doc.size());
  ASSERT_EQ(table.header.size(), doc[0].size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const auto& key = table.header[c];
      const auto& cell = table.rows[r].fields[c];
      const auto& value = doc[r].at(key);
      if (value.is_null()) {
        EXPECT_EQ(cell, "") << key;
      } else if (value.is_number()) {
        EXPECT_EQ(cell, std::to_string(value.get<int>())) << key;
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& flag : value) {
          CautionFlag f{};
          for (const auto kind : {CautionKind::AnalogUnderMandate, CautionKind::LongLag,
                                  CautionKind::OptionalShareDivergence, CautionKind::SmallOverlap}) {
            if (caution_name(kind) == flag["kind"].get<std::string>()) f.kind = kind;
          }
          f.value = flag["value"].get<std::int64_t>();
          if (!joined.empty()) joined += ';';
          joined += to_string(f);
        }
        EXPECT_EQ(cell, joined) << key;
      } else {
        EXPECT_EQ(cell, value.get<std::string>()) << key;
      }
    }
  }
}

TEST(Report, CsvSchema) {
  const auto text = render(OutputFormat::Csv);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "feature,year,equipped_pct,activation_pct,activated_of_fleet_pct,provenance,analog,lag_years,"
            "activation_source,activation_donor,cautions");
  EXPECT_NE(text.find("adaptive_cruise_control,2022,16,57,9,lag_transfer,lane_departure_warning,2,observed,,"),
            std::string::npos);
}

TEST(Report, TableFootnotes) {
  const auto text = render(OutputFormat::Table);
  EXPECT_NE(text.find("16%[1]"), std::string::npos);
  EXPECT_NE(text.find("[1] caution: small_overlap(1y)"), std::string::npos);
  EXPECT_NE(text.find("analog_under_mandate(2009)"), std::string::npos);
  EXPECT_NE(text.find("57%*"), std::string::npos);
  EXPECT_NE(text.find("fars_lag_transfer(ESC,18)"), std::string::npos);
}

TEST(Report, Deterministic) {
  for (const auto format : {OutputFormat::Table, OutputFormat::Csv, OutputFormat::Json}) {
    EXPECT_EQ(render(format), render(format));
  }
}

TEST(Report, Forecast) {
  ForecastReport report;
  report.year = 2022;
  report.rows.push_back({FeatureId::AutomaticEmergencyBraking, Fraction::parse("0.20"), Fraction::parse("0.22"), -2.0});
  report.rows.push_back({FeatureId::ForwardCollisionPrevention, Fraction::parse("0.22"), Fraction::parse("0.22"), 0.0});
  report.mean_absolute_error_pp = 1.0;
  std::ostringstream csv_out, table_out;
  render_forecast(csv_out, report, OutputFormat::Csv);
  render_forecast(table_out, report, OutputFormat::Table);
  EXPECT_EQ(csv_out.str(),
            "feature,year,predicted,estimated,error_pp\n"
            "automatic_emergency_braking,2022,0.2,0.22,-2.0\n"
            "forward_collision_prevention,2022,0.22,0.22,0.0\n"
            "mean_absolute_error,2022,,,1.0\n");
  EXPECT_NE(table_out.str().find("Mean absolute error: 1.0 pp"), std::string::npos);
}

TEST(Report, ParseFormat) {
  EXPECT_EQ(parse_output_format("csv"), OutputFormat::Csv);
  EXPECT_EQ(parse_output_format("xml"), std::nullopt);
}

TEST(DataDirsTest, UserDirectoryTakesPrecedence) {
  const auto dir = std::filesystem::temp_directory_path() / "adas_datadirs_test";
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "fleet.csv") << "feature,calendar_year,equipped_frac\n"; }
  const DataDirs dirs(dir);
  EXPECT_EQ(dirs.resolve(kFleetFile), dir / "fleet.csv");
  EXPECT_EQ(dirs.resolve(kAdoptionFile), DataDirs::default_bundled() / "adoption.csv");
  EXPECT_FALSE(dirs.find("nothing.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace adas
