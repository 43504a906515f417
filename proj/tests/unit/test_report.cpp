#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leadlag/report.hpp"
#include "test_support.hpp"

using namespace leadlag;

constexpr double kPi = std::numbers::pi;

namespace {

const std::filesystem::path kOut = LEADLAG_OUTPUT_DIR;
const std::filesystem::path kGolden = LEADLAG_GOLDEN_DIR;

AngularDistribution dist(const std::vector<double>& angles) {
  AngularDistribution d;
  for (double a : angles) d.samples.push_back(PhaseSample{a, 0, 0, TimeSelector::ExtremumTime, 0});
  return d;
}

std::string rose(const std::vector<AngularDistribution>& ds, int bins = 24) {
  std::vector<double> pooled;
  for (const auto& d : ds) {
    for (double a : d.angles()) pooled.push_back(a);
  }
  std::ostringstream out;
  write_rose_plot(out, aggregate_histograms(ds, bins), summarize(pooled), "fixture");
  return out.str();
}

void save(const std::string& name, const std::string& text) {
  std::filesystem::create_directories(kOut);
  std::ofstream(kOut / name, std::ios::binary) << text;
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto p = text.find(what); p != std::string::npos; p = text.find(what, p + 1)) ++n;
  return n;
}

ReportRow sample_row() {
  ReportRow r;
  r.prime = "DAX";
  r.sec = "SP";
  r.alpha_hat = 0.0123456;
  r.d = 0.0081;
  r.alpha_w = -0.0004;
  r.d_w = 0.003;
  r.lead_minutes = 12.34567;
  r.d_lead = 2.5;
  r.S_hat = 0.1234;
  r.b_hat = 0.0;
  r.k_hat = 0.91;
  r.p_ww = 1.0 / 3.0;
  r.h_m = 0;
  r.leader = Leader::Prime;
  return r;
}

}  // namespace

TEST_CASE("csv formatting") {
  std::ostringstream empty;
  write_table(empty, {}, TableFormat::Csv);
  CHECK(empty.str() ==
        "prime,sec,alpha_hat,d,alpha_w,d_w,lead_minutes,d_lead,S_hat,b_hat,k_hat,p_ww,h_m,leader\n");

  std::vector<ReportRow> rows{sample_row(), ReportRow{}};
  rows[1].prime = "A";
  rows[1].sec = "B";
  std::ostringstream out;
  write_table(out, rows, TableFormat::Csv);
  std::istringstream lines(out.str());
  std::string header;
  std::string first;
  std::string second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first == "DAX,SP,0.012,0.008,0.000,0.003,12.346,2.500,0.123,0.000,0.910,0.333,0,prime");
  CHECK(second == "A,B,NA,NA,NA,NA,NA,NA,1.000,NA,NA,NA,NA,none");
}

TEST_CASE("json round-trip is lossless") {
  std::vector<ReportRow> rows{sample_row(), ReportRow{}};
  std::stringstream buf;
  write_table(buf, rows, TableFormat::Json);
  const auto back = read_table_json(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].alpha_hat == rows[0].alpha_hat);
  CHECK(back[0].p_ww == rows[0].p_ww);
  CHECK(back[0].lead_minutes == rows[0].lead_minutes);
  CHECK(back[0].h_m == rows[0].h_m);
  CHECK(back[0].leader == Leader::Prime);
  CHECK_FALSE(back[1].alpha_hat.has_value());
  CHECK(back[1].S_hat == 1.0);
  CHECK(nlohmann::json::parse(buf.str()).is_array());
}

TEST_CASE("leader follows the classification") {
  CHECK(leader_of(LeadClass::PrimaryLeads) == Leader::Prime);
  CHECK(leader_of(LeadClass::SecondaryLeads) == Leader::Sec);
  CHECK(leader_of(LeadClass::Undecided) == Leader::None);
  CHECK(leader_of(LeadClass::NotPositivelyCorrelated) == Leader::None);
  CHECK(file_stem("EUR/USD", "Eurex DAX") == "EUR_USD_Eurex_DAX");
}

TEST_CASE("point-mass rose") {
  const std::string svg = rose({dist({0.0, 0.0, 0.0})});
  save("point_mass_rose.svg", svg);
  CHECK(count(svg, "<path") == 1);
  CHECK(count(svg, "stroke=\"green\"") == 1);
  CHECK(count(svg, "stroke=\"red\"") == 1);
  // Both mean lines point straight up from the centre.
  CHECK(svg.find("x1=\"210.000\" y1=\"210.000\" x2=\"210.000\" y2=\"40.000\" "
                 "stroke=\"green\"") != std::string::npos);
}

TEST_CASE("uniform rose has equal wedges and no mean lines") {
  std::vector<double> angles;
  for (int k = 0; k < 24; ++k) angles.push_back(-kPi + (k + 0.5) * kPi / 12);
  const std::string svg = rose({dist(angles)});
  save("uniform_rose.svg", svg);
  CHECK(count(svg, "<path") == 24);
  CHECK(count(svg, "A 170.000 170.000") == 24);
  CHECK(count(svg, "stroke=\"green\"") == 0);
  CHECK(count(svg, "stroke=\"red\"") == 0);
  CHECK_THROWS_AS(rose({dist(angles)}, 2), std::invalid_argument);
}

TEST_CASE("fixture rose matches the golden file") {
  std::mt19937_64 rng(42);
  std::vector<AngularDistribution> ds;
  for (int g = 0; g < 6; ++g) ds.push_back(dist(testing::von_mises_sample(rng, 80, 0.4, 2.0)));
  const std::string svg = rose(ds);
  CHECK(svg == rose(ds));
  save("fixture_rose.svg", svg);
  const auto golden = kGolden / "fixture_rose.svg";
  if (std::getenv("LEADLAG_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden, std::ios::binary) << svg;
  }
  std::ifstream in(golden, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file; rerun with LEADLAG_UPDATE_GOLDEN=1");
  const std::string want((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(svg == want);
}

TEST_CASE("report files for a pair analysis") {
  testing::SinusoidSpec spec;
  spec.count = 6000;
  const CandleSeries a = testing::sinusoid_candles(spec);
  spec.delay = 5;
  spec.symbol = "LAG";
  const CandleSeries b = testing::sinusoid_candles(spec);
  SweepConfig config;
  config.min_wavelength = 49;
  config.max_wavelength = 51;
  const PairReport report = run_pair_analysis(a, b, config);

  const auto dir = kOut / "pair";
  std::filesystem::remove_all(dir);
  const auto files = write_report_files(report, dir);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  for (const char* name : {"SIN_LAG_fwd_extrema.csv", "SIN_LAG_rev_confirmed.json",
                           "SIN_LAG_fwd_extrema_rose.svg", "SIN_LAG_extrema_table.csv",
                           "SIN_LAG_manifest.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / name), name);
  }
  std::filesystem::copy_file(dir / "SIN_LAG_fwd_extrema_rose.svg", kOut / "pair_rose.svg",
                             std::filesystem::copy_options::overwrite_existing);

  std::ifstream manifest(dir / "SIN_LAG_manifest.json");
  const auto m = nlohmann::json::parse(manifest);
  CHECK(m["config"]["min_wavelength"] == 49);
  CHECK_FALSE(m["config"].contains("jobs"));

  const ReportRow row = make_row(report.directions[0]);
  CHECK(row.prime == "SIN");
  CHECK(row.sec == "LAG");
  CHECK(row.leader == Leader::Prime);
  CHECK(row.alpha_w == report.directions[0].summary.weighted_mean);
}
