#include "leadlag/report.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "leadlag/error.hpp"

namespace leadlag {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr const char* kColumns =
    "prime,sec,alpha_hat,d,alpha_w,d_w,lead_minutes,d_lead,S_hat,b_hat,k_hat,p_ww,h_m,leader";

// Fixed three decimals; a value that rounds to zero never prints as "-0.000".
std::string fixed3(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string cell(const std::optional<double>& v) { return v ? fixed3(*v) : "NA"; }

std::string csv_text(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_text(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json row_json(const ReportRow& r) {
  return json{{"prime", r.prime},       {"sec", r.sec},         {"alpha_hat", opt(r.alpha_hat)},
              {"d", opt(r.d)},          {"alpha_w", opt(r.alpha_w)}, {"d_w", opt(r.d_w)},
              {"lead_minutes", opt(r.lead_minutes)}, {"d_lead", opt(r.d_lead)},
              {"S_hat", r.S_hat},       {"b_hat", opt(r.b_hat)}, {"k_hat", opt(r.k_hat)},
              {"p_ww", opt(r.p_ww)},    {"h_m", opt(r.h_m)},    {"leader", to_string(r.leader)}};
}

Leader leader_from_string(std::string_view s) {
  if (s == "prime") return Leader::Prime;
  if (s == "sec") return Leader::Sec;
  if (s == "none") return Leader::None;
  throw DataError(fmt::format("unknown leader '{}'", s));
}

json summary_json(const CircularSummary& s) {
  return json{{"n", s.n},
              {"mean_direction", opt(s.mean_direction)},
              {"resultant_length", s.resultant_length},
              {"variance", s.variance},
              {"skewness", opt(s.skewness)},
              {"kurtosis", opt(s.kurtosis)},
              {"ci_halfwidth", opt(s.ci_halfwidth)},
              {"hat_center", s.hat_center},
              {"weighted_mean", opt(s.weighted_mean)},
              {"weighted_resultant_length", s.weighted_resultant_length},
              {"effective_n", s.effective_n},
              {"weighted_ci", opt(s.weighted_ci)}};
}

json histogram_json(const AggregatedHistogram& h) {
  return json{{"groups", h.groups},       {"bin_edges", h.bin_edges}, {"mean_freq", h.mean_freq},
              {"min_freq", h.min_freq},   {"max_freq", h.max_freq},   {"std_freq", h.std_freq},
              {"pooled_freq", h.pooled_freq}};
}

json calibration_json(const CalibrationResult& c) {
  return json{{"timescale", c.timescale},
              {"achieved_wavelength_seconds", c.achieved_wavelength},
              {"target_wavelength_seconds", c.target_wavelength},
              {"relative_error", c.relative_error},
              {"extrema", c.extrema_count}};
}

json groups_json(const DirectionReport& r) {
  json groups = json::array();
  for (const WavelengthGroup& g : r.groups) {
    groups.push_back(json{{"wavelength_candles", g.wavelength_candles},
                          {"primary", calibration_json(g.primary_calibration)},
                          {"secondary", calibration_json(g.secondary_calibration)},
                          {"lambda_star_seconds", g.lambda_star_seconds},
                          {"samples", g.samples},
                          {"weighted_mean", opt(g.weighted_mean)},
                          {"lead_minutes", opt(g.lead_minutes)}});
  }
  return groups;
}

json failures_json(const DirectionReport& r) {
  json failures = json::array();
  for (const GroupFailure& f : r.failures) {
    failures.push_back(json{{"wavelength_candles", f.wavelength_candles}, {"reason", f.reason}});
  }
  return failures;
}

void check_sink(const std::ostream& sink, std::string_view what) {
  if (!sink) throw std::runtime_error(fmt::format("{}: output sink failure", what));
}

std::string direction_tag(std::size_t ordering) { return ordering == 0 ? "fwd" : "rev"; }

}  // namespace

std::string_view to_string(Leader leader) {
  switch (leader) {
    case Leader::Prime: return "prime";
    case Leader::Sec: return "sec";
    case Leader::None: return "none";
  }
  return "none";
}

Leader leader_of(LeadClass c) {
  if (c == LeadClass::PrimaryLeads) return Leader::Prime;
  if (c == LeadClass::SecondaryLeads) return Leader::Sec;
  return Leader::None;
}

ReportRow make_row(const DirectionReport& report) {
  const CircularSummary& s = report.summary;
  ReportRow r;
  r.prime = report.primary_symbol;
  r.sec = report.secondary_symbol;
  r.alpha_hat = s.mean_direction;
  r.d = s.ci_halfwidth;
  r.alpha_w = s.weighted_mean;
  r.d_w = s.weighted_ci;
  r.lead_minutes = report.lead_minutes;
  r.d_lead = report.lead_ci_minutes;
  r.S_hat = s.variance;
  r.b_hat = s.skewness;
  r.k_hat = s.kurtosis;
  r.p_ww = report.p_ww;
  r.h_m = report.h_m;
  r.leader = leader_of(report.classification);
  return r;
}

void write_table(std::ostream& sink, std::span<const ReportRow> rows, TableFormat format) {
  if (format == TableFormat::Csv) {
    sink << kColumns << '\n';
    for (const ReportRow& r : rows) {
      sink << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_text(r.prime),
                          csv_text(r.sec), cell(r.alpha_hat), cell(r.d), cell(r.alpha_w),
                          cell(r.d_w), cell(r.lead_minutes), cell(r.d_lead), fixed3(r.S_hat),
                          cell(r.b_hat), cell(r.k_hat), cell(r.p_ww),
                          r.h_m ? std::to_string(*r.h_m) : "NA", to_string(r.leader));
    }
  } else {
    json out = json::array();
    for (const ReportRow& r : rows) out.push_back(row_json(r));
    sink << out.dump(2) << '\n';
  }
  check_sink(sink, "write_table");
}

std::vector<ReportRow> read_table_json(std::istream& source) {
  json in;
  try {
    in = json::parse(source);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("report table: {}", e.what()));
  }
  std::vector<ReportRow> rows;
  for (const json& j : in) {
    ReportRow r;
    r.prime = j.at("prime").get<std::string>();
    r.sec = j.at("sec").get<std::string>();
    r.alpha_hat = opt_from<double>(j, "alpha_hat");
    r.d = opt_from<double>(j, "d");
    r.alpha_w = opt_from<double>(j, "alpha_w");
    r.d_w = opt_from<double>(j, "d_w");
    r.lead_minutes = opt_from<double>(j, "lead_minutes");
    r.d_lead = opt_from<double>(j, "d_lead");
    r.S_hat = j.at("S_hat").get<double>();
    r.b_hat = opt_from<double>(j, "b_hat");
    r.k_hat = opt_from<double>(j, "k_hat");
    r.p_ww = opt_from<double>(j, "p_ww");
    r.h_m = opt_from<int>(j, "h_m");
    r.leader = leader_from_string(j.at("leader").get<std::string>());
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_rose_plot(std::ostream& sink, const AggregatedHistogram& hist,
                     const CircularSummary& summary, std::string_view title) {
  const std::size_t bins = hist.bins();
  if (bins < 4) throw std::invalid_argument("write_rose_plot: at least 4 bins are required");
  constexpr double size = 420.0;
  constexpr double c = size / 2.0;
  constexpr double rmax = 170.0;

  double scale = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    scale = std::max({scale, hist.max_freq[k], hist.pooled_freq[k],
                      hist.pooled_freq[k] + hist.std_freq[k]});
  }
  if (!(scale > 0.0)) scale = 1.0;
  const auto radius = [&](double f) { return rmax * std::max(0.0, f) / scale; };
  const auto px = [&](double angle, double r) { return fixed3(c + r * std::sin(angle)); };
  const auto py = [&](double angle, double r) { return fixed3(c - r * std::cos(angle)); };
  const auto spoke = [&](double angle, double r0, double r1, std::string_view style) {
    return fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>\n", px(angle, r0),
                       py(angle, r0), px(angle, r1), py(angle, r1), style);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" "
      "height=\"{0:.0f}\" viewBox=\"0 0 {0:.0f} {0:.0f}\">\n",
      size);
  if (!title.empty()) svg += fmt::format("<title>{}</title>\n", xml_text(title));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{0:.0f}\" height=\"{0:.0f}\" fill=\"white\"/>\n",
                     size);
  svg += fmt::format(
      "<circle cx=\"{0}\" cy=\"{0}\" r=\"{1}\" fill=\"none\" stroke=\"#999999\" "
      "stroke-width=\"1\"/>\n",
      fixed3(c), fixed3(rmax));
  svg += fmt::format(
      "<circle cx=\"{0}\" cy=\"{0}\" r=\"{1}\" fill=\"none\" stroke=\"#cccccc\" "
      "stroke-width=\"1\" stroke-dasharray=\"4 4\"/>\n",
      fixed3(c), fixed3(rmax / 2.0));
  constexpr std::string_view axis_style = "stroke=\"#cccccc\" stroke-width=\"1\"";
  for (int q = 0; q < 4; ++q) svg += spoke(q * kPi / 2.0, 0.0, rmax, axis_style);
  const char* labels[4] = {"0", "pi/2", "+-pi", "-pi/2"};
  for (int q = 0; q < 4; ++q) {
    const double a = q * kPi / 2.0;
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
        "text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>\n",
        px(a, rmax + 22.0), py(a, rmax + 22.0), labels[q]);
  }

  svg += "<g fill=\"#6a8fc7\" fill-opacity=\"0.75\" stroke=\"#2c4f86\" stroke-width=\"1\">\n";
  for (std::size_t k = 0; k < bins; ++k) {
    if (!(hist.pooled_freq[k] > 0.0)) continue;
    const double a0 = hist.bin_edges[k];
    const double a1 = hist.bin_edges[k + 1];
    const double r = radius(hist.pooled_freq[k]);
    svg += fmt::format("<path d=\"M {0} {0} L {1} {2} A {3} {3} 0 0 1 {4} {5} Z\"/>\n", fixed3(c),
                       px(a0, r), py(a0, r), fixed3(r), px(a1, r), py(a1, r));
  }
  svg += "</g>\n";

  constexpr std::string_view range_style = "stroke=\"#333333\" stroke-width=\"1.5\"";
  constexpr std::string_view std_style = "stroke=\"#d08a00\" stroke-width=\"1.5\"";
  for (std::size_t k = 0; k < bins; ++k) {
    const double width = hist.bin_edges[k + 1] - hist.bin_edges[k];
    const double mid = hist.bin_edges[k] + width / 2.0;
    if (hist.max_freq[k] > 0.0) {
      svg += spoke(mid - width / 6.0, radius(hist.min_freq[k]), radius(hist.max_freq[k]),
                   range_style);
    }
    if (hist.std_freq[k] > 0.0) {
      svg += spoke(mid + width / 6.0, radius(hist.pooled_freq[k] - hist.std_freq[k]),
                   radius(hist.pooled_freq[k] + hist.std_freq[k]), std_style);
    }
  }

  if (summary.mean_direction) {
    svg += spoke(*summary.mean_direction, 0.0, rmax, "stroke=\"green\" stroke-width=\"2.5\"");
  }
  // Without an unweighted direction the hat-weighted mean only echoes the hat
  // center, so it is suppressed as well.
  if (summary.mean_direction && summary.weighted_mean) {
    svg += spoke(*summary.weighted_mean, 0.0, rmax, "stroke=\"red\" stroke-width=\"2\"");
  }
  svg += "</svg>\n";
  sink << svg;
  check_sink(sink, "write_rose_plot");
}

void write_direction_json(std::ostream& sink, const DirectionReport& report) {
  const json out{{"row", row_json(make_row(report))},
                 {"mode", to_string(report.mode)},
                 {"classification", to_string(report.classification)},
                 {"summary", summary_json(report.summary)},
                 {"h_m", opt(report.h_m)},
                 {"p_ww", opt(report.p_ww)},
                 {"ww_groups", report.ww_groups},
                 {"lead_minutes", opt(report.lead_minutes)},
                 {"lead_ci_minutes", opt(report.lead_ci_minutes)},
                 {"lead_pooled_minutes", opt(report.lead_pooled_minutes)},
                 {"lead_unweighted_minutes", opt(report.lead_unweighted_minutes)},
                 {"mean_wavelength_minutes", report.mean_wavelength_minutes},
                 {"histogram", histogram_json(report.histogram)},
                 {"groups", groups_json(report)},
                 {"failures", failures_json(report)}};
  sink << out.dump(2) << '\n';
  check_sink(sink, "write_direction_json");
}

void write_manifest(std::ostream& sink, const PairReport& report) {
  const SweepConfig& c = report.config;
  json modes = json::array();
  for (TimeSelector m : c.time_modes) modes.push_back(to_string(m));
  json directions = json::array();
  for (const DirectionReport& d : report.directions) {
    directions.push_back(json{{"prime", d.primary_symbol},
                              {"sec", d.secondary_symbol},
                              {"mode", to_string(d.mode)},
                              {"groups", groups_json(d)},
                              {"failures", failures_json(d)}});
  }
  const json out{
      {"primary", {{"symbol", report.primary_symbol}, {"data_hash", report.primary_hash}}},
      {"secondary", {{"symbol", report.secondary_symbol}, {"data_hash", report.secondary_hash}}},
      {"config",
       {{"min_wavelength", c.min_wavelength},
        {"max_wavelength", c.max_wavelength},
        {"wavelength_step", c.wavelength_step},
        {"bar_duration", c.bar_duration},
        {"time_modes", modes},
        {"histogram_bins", c.histogram_bins},
        {"hat_center", c.hat_center},
        {"hat_at_mode", c.hat_at_mode},
        {"tolerance", c.tolerance},
        {"delta", c.delta_coeff},
        {"max_failed_fraction", c.max_failed_fraction},
        {"confidence_level", c.confidence_level}}},
      {"directions", directions}};
  sink << out.dump(2) << '\n';
  check_sink(sink, "write_manifest");
}

std::string file_stem(std::string_view prime, std::string_view sec) {
  std::string out;
  const auto append = [&](std::string_view s) {
    for (char ch : s) {
      const bool keep = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
                        (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
      out += keep ? ch : '_';
    }
  };
  append(prime);
  out += '_';
  append(sec);
  return out;
}

std::vector<std::filesystem::path> write_report_files(const PairReport& report,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto open = [&](const std::string& name) {
    written.push_back(dir / name);
    std::ofstream f(written.back(), std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot write '{}'", written.back().string()));
    return f;
  };
  const std::string stem = file_stem(report.primary_symbol, report.secondary_symbol);
  const std::size_t per_ordering = report.config.time_modes.size();

  for (std::size_t i = 0; i < report.directions.size(); ++i) {
    const DirectionReport& d = report.directions[i];
    const std::string base =
        fmt::format("{}_{}_{}", stem, direction_tag(i / per_ordering), to_string(d.mode));
    const ReportRow row = make_row(d);
    {
      auto f = open(base + ".csv");
      write_table(f, std::span(&row, 1), TableFormat::Csv);
    }
    {
      auto f = open(base + ".json");
      write_direction_json(f, d);
    }
    {
      auto f = open(base + "_rose.svg");
      write_rose_plot(f, d.histogram, d.summary,
                      fmt::format("{} vs {} ({})", d.primary_symbol, d.secondary_symbol,
                                  to_string(d.mode)));
    }
  }

  // Paired rows per time mode, both orderings.
  for (std::size_t m = 0; m < per_ordering; ++m) {
    std::vector<ReportRow> rows;
    for (std::size_t i = m; i < report.directions.size(); i += per_ordering) {
      rows.push_back(make_row(report.directions[i]));
    }
    auto f = open(fmt::format("{}_{}_table.csv", stem, to_string(report.config.time_modes[m])));
    write_table(f, rows, TableFormat::Csv);
  }
  {
    auto f = open(stem + "_manifest.json");
    write_manifest(f, report);
  }
  return written;
}

}  // namespace leadlag
