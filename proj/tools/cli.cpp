#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "leadlag/calibration.hpp"
#include "leadlag/circular_stats.hpp"
#include "leadlag/error.hpp"
#include "leadlag/market_data.hpp"
#include "leadlag/minmax.hpp"
#include "leadlag/parallel.hpp"
#include "leadlag/pipeline.hpp"
#include "leadlag/report.hpp"

namespace leadlag::cli {

namespace {

constexpr const char* kCacheEnv = "LEADLAG_CACHE";

// Command-line or configuration problems that are not caught by CLI11.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fixed3(const std::optional<double>& v) {
  if (!v) return "NA";
  std::string s = fmt::format("{:.3f}", *v);
  return s == "-0.000" ? "0.000" : s;
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// `key = value` lines; '#' starts a comment. Keys are long flag names.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot open config file '{}'", path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(fmt::format("{}:{}: expected 'key = value'", path, line_no));
    }
    std::string key = trim(body.substr(0, eq));
    if (key.starts_with("--")) key.erase(0, 2);
    entries.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return entries;
}

bool flag_given(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.starts_with(flag + "=");
  });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].starts_with("--config=")) return args[i].substr(9);
  }
  return std::nullopt;
}

// Appends `--key=value` for every config entry whose flag is absent from the
// command line, so explicit flags always win.
std::vector<std::string> inject_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  const CLI::App* sub = app.get_subcommand_no_throw(args.front());
  if (sub == nullptr) return args;
  const auto path = config_path(args);
  if (!path) return args;
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config_file(*path)) {
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
      throw UsageError(fmt::format("{}: unknown key '{}' for '{}'", *path, key, sub->get_name()));
    }
    if (!flag_given(args, key)) extra.push_back(fmt::format("--{}={}", key, value));
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

struct CacheHandle {
  std::optional<std::string> path;
  CalibrationCache cache;

  explicit CacheHandle(const std::string& flag) {
    if (!flag.empty()) {
      path = flag;
    } else if (const char* env = std::getenv(kCacheEnv); env != nullptr && *env != '\0') {
      path = env;
    }
    if (path) cache = CalibrationCache::load(*path);
  }
  CalibrationCache* get() { return path ? &cache : nullptr; }
  void save() const {
    if (path) cache.save(*path);
  }
};

ColumnSchema schema_for(bool positional) {
  return positional ? ColumnSchema::positional() : ColumnSchema{};
}

struct AnalyzeArgs {
  std::string primary;
  std::string secondary;
  std::string primary_symbol;
  std::string secondary_symbol;
  std::string out_dir;
  std::string cache;
  std::vector<std::string> modes{"extrema", "confirmed"};
  bool positional = false;
  unsigned jobs = default_jobs();
  SweepConfig sweep;
};

struct SeriesArgs {
  std::string input;
  std::string symbol;
  std::string cache;
  std::string mode = "candles";
  std::string out = "-";
  EpochSeconds bar = 3600;
  double tolerance = 0.02;
  double delta = 0.3;
  std::optional<double> timescale;
  std::optional<double> wavelength;
  bool positional = false;
  unsigned jobs = default_jobs();
};

struct StatsArgs {
  std::string angles;
  double hat_center = 0.0;
  double level = 0.95;
  double alpha0 = 0.0;
};

int run_analyze(AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  a.sweep.time_modes.clear();
  for (const std::string& m : a.modes) {
    try {
      a.sweep.time_modes.push_back(time_selector_from_string(m));
    } catch (const std::invalid_argument& e) {
      throw UsageError(fmt::format("--modes: {} (expected extrema and/or confirmed)", e.what()));
    }
  }
  a.sweep.jobs = std::max(1u, a.jobs);
  try {
    a.sweep.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ColumnSchema schema = schema_for(a.positional);
  const CandleSeries p = load_candles_file(
      a.primary, schema, a.sweep.bar_duration,
      a.primary_symbol.empty() ? stem_of(a.primary) : a.primary_symbol);
  const CandleSeries s = load_candles_file(
      a.secondary, schema, a.sweep.bar_duration,
      a.secondary_symbol.empty() ? stem_of(a.secondary) : a.secondary_symbol);

  CacheHandle cache(a.cache);
  a.sweep.cache = cache.get();
  const PairReport report = run_pair_analysis(p, s, a.sweep);
  cache.save();

  for (const DirectionReport& d : report.directions) {
    for (const GroupFailure& f : d.failures) {
      err << fmt::format("warning: {} -> {} ({}): wavelength {} skipped: {}\n", d.primary_symbol,
                         d.secondary_symbol, to_string(d.mode), f.wavelength_candles, f.reason);
    }
  }
  const auto files = write_report_files(report, a.out_dir);
  std::vector<ReportRow> rows;
  for (const DirectionReport& d : report.directions) rows.push_back(make_row(d));
  write_table(out, rows, TableFormat::Csv);
  err << fmt::format("wrote {} files to {}\n", files.size(), a.out_dir);
  return kOk;
}

CandleSeries load_series(const SeriesArgs& a) {
  return load_candles_file(a.input, schema_for(a.positional), a.bar,
                           a.symbol.empty() ? stem_of(a.input) : a.symbol);
}

TimeMode parse_mode(const std::string& text) {
  try {
    return time_mode_from_string(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(fmt::format("--mode: {}", e.what()));
  }
}

CalibrationResult calibrate_series(const MinMaxDetector& detector, const SeriesArgs& a,
                                   CacheHandle& cache) {
  CalibrationOptions options;
  options.tolerance = a.tolerance;
  options.jobs = std::max(1u, a.jobs);
  options.cache = cache.get();
  const double target = *a.wavelength * static_cast<double>(a.bar);
  const CalibrationResult r = calibrate_timescale(detector, target, parse_mode(a.mode), options);
  cache.save();
  return r;
}

int run_extrema(const SeriesArgs& a, std::ostream& out) {
  const MinMaxDetector detector(load_series(a), a.delta);
  double timescale = 0.0;
  if (a.timescale) {
    timescale = *a.timescale;
  } else {
    CacheHandle cache(a.cache);
    timescale = calibrate_series(detector, a, cache).timescale;
  }
  const ExtremumSeries extrema = detector.detect(timescale);
  if (a.out == "-") {
    write_extrema_csv(out, extrema);
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot write '{}'", a.out));
    write_extrema_csv(f, extrema);
  }
  return kOk;
}

int run_calibrate(const SeriesArgs& a, std::ostream& out) {
  const MinMaxDetector detector(load_series(a), a.delta);
  CacheHandle cache(a.cache);
  const CalibrationResult r = calibrate_series(detector, a, cache);
  out << fmt::format("symbol: {}\n", detector.series().symbol());
  out << fmt::format("timescale: {:.6f}\n", r.timescale);
  out << fmt::format("target_wavelength_candles: {:.3f}\n",
                     r.target_wavelength / static_cast<double>(a.bar));
  out << fmt::format("achieved_wavelength_candles: {:.3f}\n",
                     r.achieved_wavelength / static_cast<double>(a.bar));
  out << fmt::format("relative_error: {:.6f}\n", r.relative_error);
  out << fmt::format("extrema: {}\n", r.extrema_count);
  return kOk;
}

std::vector<double> read_angles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  std::vector<double> angles;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const std::string field = trim(line.substr(0, line.find(',')));
    if (field.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size() || !std::isfinite(v)) {
      if (line_no == 1) continue;  // header
      throw DataError(fmt::format("{}: row {}: malformed angle '{}'", path, line_no, field));
    }
    angles.push_back(v);
  }
  if (angles.empty()) throw DataError(fmt::format("{}: empty input", path));
  return angles;
}

int run_stats(const StatsArgs& a, std::ostream& out) {
  const std::vector<double> angles = read_angles(a.angles);
  const CircularSummary s = summarize(angles, a.hat_center, a.level);
  std::optional<int> h_m;
  if (s.mean_direction && s.ci_halfwidth) {
    h_m = one_sample_mean_test(*s.mean_direction, *s.ci_halfwidth, a.alpha0);
  }
  out << fmt::format("n: {}\n", s.n);
  out << fmt::format("mean_direction: {}\n", fixed3(s.mean_direction));
  out << fmt::format("resultant_length: {}\n", fixed3(s.resultant_length));
  out << fmt::format("variance: {}\n", fixed3(s.variance));
  out << fmt::format("skewness: {}\n", fixed3(s.skewness));
  out << fmt::format("kurtosis: {}\n", fixed3(s.kurtosis));
  out << fmt::format("ci_halfwidth: {}\n", fixed3(s.ci_halfwidth));
  out << fmt::format("h_m: {}\n", h_m ? std::to_string(*h_m) : "NA");
  out << fmt::format("weighted_mean: {}\n", fixed3(s.weighted_mean));
  out << fmt::format("weighted_ci: {}\n", fixed3(s.weighted_ci));
  out << fmt::format("effective_n: {}\n", fixed3(s.effective_n));
  out << fmt::format("classification: {}\n", to_string(classify_direction(s)));
  return kOk;
}

void add_series_options(CLI::App* sub, SeriesArgs& a) {
  sub->add_option("--input", a.input, "Candle CSV")->required();
  sub->add_option("--symbol", a.symbol, "Market name (default: file stem)");
  sub->add_option("--bar", a.bar, "Bar duration in seconds")->capture_default_str();
  sub->add_flag("--positional", a.positional, "Headerless time,open,high,low,close[,volume]");
  sub->add_option("--delta", a.delta, "SAR threshold as a multiple of ATR(100)")
      ->capture_default_str();
  sub->add_option("--tolerance", a.tolerance, "Relative wavelength tolerance")
      ->capture_default_str();
  sub->add_option("--mode", a.mode, "Wavelength clock: candles or seconds")->capture_default_str();
  sub->add_option("--cache", a.cache, fmt::format("Calibration cache file (or ${})", kCacheEnv));
  sub->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", "key = value file with defaults for these flags");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lead-lag analysis of two markets from their relevant local extrema", "leadlag"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  CLI::App* a = app.add_subcommand("analyze", "Full wavelength sweep and reports");
  a->add_option("--primary", analyze.primary, "Primary market candle CSV")->required();
  a->add_option("--secondary", analyze.secondary, "Secondary market candle CSV")->required();
  a->add_option("--out", analyze.out_dir, "Output directory")->required();
  a->add_option("--primary-symbol", analyze.primary_symbol, "Primary name (default: file stem)");
  a->add_option("--secondary-symbol", analyze.secondary_symbol,
                "Secondary name (default: file stem)");
  a->add_option("--bar", analyze.sweep.bar_duration, "Bar duration in seconds")
      ->capture_default_str();
  a->add_option("--min-wavelength", analyze.sweep.min_wavelength, "Shortest wavelength (candles)")
      ->capture_default_str();
  a->add_option("--max-wavelength", analyze.sweep.max_wavelength, "Longest wavelength (candles)")
      ->capture_default_str();
  a->add_option("--step", analyze.sweep.wavelength_step, "Wavelength step (candles)")
      ->capture_default_str();
  a->add_option("--modes", analyze.modes, "Time modes: extrema, confirmed")
      ->delimiter(',')
      ->capture_default_str();
  a->add_option("--bins", analyze.sweep.histogram_bins, "Histogram bins (even, >= 4)")
      ->capture_default_str();
  a->add_option("--hat-center", analyze.sweep.hat_center, "Hat weight center (radians)")
      ->capture_default_str();
  a->add_flag("--hat-at-mode", analyze.sweep.hat_at_mode,
              "Center the hat on the fullest histogram bin");
  a->add_option("--tolerance", analyze.sweep.tolerance, "Relative wavelength tolerance")
      ->capture_default_str();
  a->add_option("--delta", analyze.sweep.delta_coeff, "SAR threshold as a multiple of ATR(100)")
      ->capture_default_str();
  a->add_option("--max-failed-fraction", analyze.sweep.max_failed_fraction,
                "Largest tolerated share of failed wavelengths")
      ->capture_default_str();
  a->add_option("--level", analyze.sweep.confidence_level, "Confidence level")
      ->capture_default_str();
  a->add_flag("--positional", analyze.positional, "Headerless time,open,high,low,close[,volume]");
  a->add_option("--cache", analyze.cache, fmt::format("Calibration cache file (or ${})", kCacheEnv));
  a->add_option("--jobs", analyze.jobs, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  a->add_option("--config", "key = value file with defaults for these flags");

  SeriesArgs extrema;
  CLI::App* e = app.add_subcommand("extrema", "Dump MinMax extrema of one market as CSV");
  add_series_options(e, extrema);
  auto* ts = e->add_option("--timescale", extrema.timescale, "MACD timescale factor");
  auto* wl = e->add_option("--wavelength", extrema.wavelength, "Target wavelength (candles)");
  ts->excludes(wl);
  e->add_option("--out", extrema.out, "Output file, '-' for stdout")->capture_default_str();

  SeriesArgs calibrate;
  CLI::App* c = app.add_subcommand("calibrate", "Find the timescale for a target wavelength");
  add_series_options(c, calibrate);
  c->add_option("--wavelength", calibrate.wavelength, "Target wavelength (candles)")->required();

  StatsArgs stats;
  CLI::App* st = app.add_subcommand("stats", "Directional statistics of an angle file");
  st->add_option("--angles", stats.angles, "One angle (radians) per line")->required();
  st->add_option("--hat-center", stats.hat_center, "Hat weight center (radians)")
      ->capture_default_str();
  st->add_option("--level", stats.level, "Confidence level")->capture_default_str();
  st->add_option("--alpha0", stats.alpha0, "Reference direction of the mean test")
      ->capture_default_str();
  st->add_option("--config", "key = value file with defaults for these flags");

  try {
    std::vector<std::string> argv = inject_config(app, args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
    if (e->parsed() && !extrema.timescale && !extrema.wavelength) {
      throw UsageError("extrema: one of --timescale or --wavelength is required");
    }
    if (a->parsed()) return run_analyze(analyze, out, err);
    if (e->parsed()) return run_extrema(extrema, out);
    if (c->parsed()) return run_calibrate(calibrate, out);
    return run_stats(stats, out);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const DataError& ex) {
    err << "data error: " << ex.what() << '\n';
    return kData;
  } catch (const AnalysisError& ex) {
    err << "analysis error: " << ex.what() << '\n';
    return kAnalysis;
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "data error: " << ex.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex) {
    err << "analysis error: " << ex.what() << '\n';
    return kAnalysis;
  }
}

}  // namespace leadlag::cli
