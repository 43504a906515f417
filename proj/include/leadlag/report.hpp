#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leadlag/pipeline.hpp"

namespace leadlag {

enum class Leader { Prime, Sec, None };

std::string_view to_string(Leader leader);
Leader leader_of(LeadClass c);

/// One table line: a market pair in one ordering and one time mode.
struct ReportRow {
  std::string prime;
  std::string sec;
  std::optional<double> alpha_hat;
  std::optional<double> d;
  std::optional<double> alpha_w;
  std::optional<double> d_w;
  std::optional<double> lead_minutes;
  std::optional<double> d_lead;
  double S_hat = 1.0;
  std::optional<double> b_hat;
  std::optional<double> k_hat;
  std::optional<double> p_ww;
  std::optional<int> h_m;
  Leader leader = Leader::None;
};

ReportRow make_row(const DirectionReport& report);

enum class TableFormat { Csv, Json };

/// CSV: fixed column order, three decimals, `NA` for undefined values.
/// JSON: array of objects at full precision, null for undefined values.
/// Throws std::runtime_error when the sink fails.
void write_table(std::ostream& sink, std::span<const ReportRow> rows, TableFormat format);

/// Inverse of the JSON table writer.
std::vector<ReportRow> read_table_json(std::istream& source);

/// Rose histogram: pooled relative frequencies as wedges, min/max and
/// pooled +- std whiskers per bin, the mean direction in green and the
/// hat-weighted mean in red (each omitted when undefined; the red line also
/// when the unweighted mean is undefined). Zero points up,
/// angles grow clockwise. Output depends only on the inputs.
void write_rose_plot(std::ostream& sink, const AggregatedHistogram& hist,
                     const CircularSummary& summary, std::string_view title = {});

/// Per-direction detail (row, summary, histogram, groups, failures) as JSON.
void write_direction_json(std::ostream& sink, const DirectionReport& report);

/// Run manifest: configuration (without parallelism), data hashes and the
/// per-wavelength calibrations of every direction.
void write_manifest(std::ostream& sink, const PairReport& report);

/// Writes every report file under `dir` (created if missing) and returns the
/// paths in writing order.
std::vector<std::filesystem::path> write_report_files(const PairReport& report,
                                                      const std::filesystem::path& dir);

/// `<prime>_<sec>` with characters outside [A-Za-z0-9.-] replaced by '_'.
std::string file_stem(std::string_view prime, std::string_view sec);

}  // namespace leadlag
