/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Command-line front door: ingest, audit, detect, simulate, serve.
 *
 * Released under the Apache 2.0 Licence
 */
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mealtrace/audit.hpp"
#include "mealtrace/csvio.hpp"
#include "mealtrace/detector.hpp"
#include "mealtrace/error.hpp"
#include "mealtrace/report_json.hpp"
#include "mealtrace/series.hpp"
#include "mealtrace/service.hpp"
#include "mealtrace/store.hpp"
#include "mealtrace/svg_report.hpp"
#include "mealtrace/synthgen.hpp"

namespace {

using namespace mealtrace;

// Exit codes: 0 ok, 2 usage/parse, 3 excluded by completeness,
// 4 no candidates / insufficient data, 5 storage.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitExcluded = 3;
constexpr int kExitNoCandidates = 4;
constexpr int kExitStorage = 5;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_candidates:
    case ErrorCode::insufficient_data:
      return kExitNoCandidates;
    case ErrorCode::conflicting_duplicate:
    case ErrorCode::unknown_participant:
    case ErrorCode::storage_failure:
    case ErrorCode::bind_failure:
      return kExitStorage;
    default:
      return kExitUsage;  // parse / validation problems
  }
}

struct Settings {
  std::string data_dir = "data";
  std::string addr = "127.0.0.1:8080";
  std::string format = "table";  // table | csv | json
  SamplingSpec sampling;
  DetectorConfig detector;
  double threshold_pct = 50.0;
};

// Flat key=value config file; '#' starts a comment. Keys mirror the flags.
void apply_config_file(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse_error, "cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(line_no);
    if (eq == std::string::npos) fail(ErrorCode::parse_error, where + ": expected key=value");
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = v.find_last_not_of(" \t\r");
      return v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "data_dir") {
      s.data_dir = value;
    } else if (key == "addr") {
      s.addr = value;
    } else if (key == "format") {
      s.format = value;
    } else if (key == "period") {
      s.sampling.nominal_period = std::chrono::seconds(
          static_cast<std::int64_t>(parse_double(value, where)));
    } else if (key == "tolerance") {
      s.sampling.contiguity_tolerance = std::chrono::seconds(
          static_cast<std::int64_t>(parse_double(value, where)));
    } else if (key == "window_len") {
      s.detector.window_len = static_cast<int>(parse_double(value, where));
    } else if (key == "iqr_factor") {
      s.detector.iqr_factor = parse_double(value, where);
    } else if (key == "merge_gap") {
      s.detector.merge_gap = std::chrono::seconds(
          static_cast<std::int64_t>(parse_double(value, where) * 60.0));
    } else if (key == "positive_filter") {
      if (value != "true" && value != "false") {
        fail(ErrorCode::parse_error, where + ": positive_filter must be true or false");
      }
      s.detector.require_positive_delta = value == "true";
    } else if (key == "threshold") {
      s.threshold_pct = parse_double(value, where);
    } else {
      fail(ErrorCode::parse_error, where + ": unknown key '" + key + "'");
    }
  }
}

OffsetTime parse_time_flag(const std::string& value, const char* flag) {
  try {
    return OffsetTime::parse_rfc3339(value);
  } catch (const Error& e) {
    fail(ErrorCode::parse_error, std::string(flag) + ": " + e.what());
  }
}

std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size()) {
    fail(ErrorCode::parse_error, "addr must be host:port, got '" + addr + "'");
  }
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (...) {
    fail(ErrorCode::parse_error, "bad port in addr '" + addr + "'");
  }
  return {addr.substr(0, colon), port};
}

std::string pct_1dp(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

// ---- ingest ----------------------------------------------------------

struct IngestRow {
  std::string participant_id;
  std::int64_t accepted = 0;
  std::int64_t duplicates = 0;
  std::int64_t implausible = 0;
};

void print_ingest_summary(const Settings& s, const std::vector<IngestRow>& rows) {
  if (s.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"participant_id", r.participant_id},
                     {"accepted", r.accepted},
                     {"duplicates", r.duplicates},
                     {"implausible", r.implausible}});
    }
    std::cout << arr.dump(2) << "\n";
  } else if (s.format == "csv") {
    std::cout << "participant_id,accepted,duplicates,implausible\n";
    for (const auto& r : rows) {
      std::cout << r.participant_id << ',' << r.accepted << ',' << r.duplicates << ','
                << r.implausible << '\n';
    }
  } else {
    std::printf("%-16s %9s %10s %11s\n", "participant", "accepted", "duplicates",
                "implausible");
    for (const auto& r : rows) {
      std::printf("%-16s %9lld %10lld %11lld\n", r.participant_id.c_str(),
                  static_cast<long long>(r.accepted),
                  static_cast<long long>(r.duplicates),
                  static_cast<long long>(r.implausible));
    }
  }
}

int cmd_ingest(const Settings& s, const std::vector<std::string>& files) {
  SampleLog log(s.data_dir);
  std::map<std::string, IngestRow> summary;
  for (const std::string& file : files) {
    auto records = read_samples_file(file);
    // One atomic append per participant per file.
    std::map<std::string, std::vector<GlucoseSample>> batches;
    for (auto& r : records) batches[r.participant_id].push_back(r.sample);
    for (auto& [id, batch] : batches) {
      auto result = log.append_samples(id, batch);
      auto& row = summary[id];
      row.participant_id = id;
      row.accepted += result.accepted;
      row.duplicates += result.duplicates;
      row.implausible += result.implausible;
    }
  }
  std::vector<IngestRow> rows;
  for (auto& [id, row] : summary) rows.push_back(row);
  print_ingest_summary(s, rows);
  return kExitOk;
}

// ---- audit -----------------------------------------------------------

StudyWindow derive_window(const SampleLog& log, const Settings& s,
                          const std::optional<OffsetTime>& start,
                          const std::optional<OffsetTime>& end) {
  if (start && end) return StudyWindow::make(*start, *end);
  if (start.has_value() != end.has_value()) {
    fail(ErrorCode::parse_error, "--start and --end must be given together");
  }
  // Default: the span of everything stored, right-padded by one period so
  // the last sample stays inside the half-open window.
  std::optional<OffsetTime> lo, hi;
  for (const std::string& id : log.participant_ids()) {
    auto series = log.load_series(id);
    if (series.empty()) continue;
    const auto& samples = series.samples();
    if (!lo || samples.front().timestamp < *lo) lo = samples.front().timestamp;
    if (!hi || *hi < samples.back().timestamp) hi = samples.back().timestamp;
  }
  if (!lo) fail(ErrorCode::parse_error, "store is empty; pass --start/--end");
  return StudyWindow::make(*lo, *hi + s.sampling.nominal_period);
}

int cmd_audit(const Settings& s, const std::optional<OffsetTime>& start,
              const std::optional<OffsetTime>& end,
              const std::optional<std::string>& participant) {
  SampleLog log(s.data_dir);

  if (participant) {
    const auto window = derive_window(log, s, start, end);
    auto report = completeness(log.load_series(*participant), window,
                               s.sampling.nominal_period, s.threshold_pct);
    if (s.format == "json") {
      std::cout << completeness_document(report);
    } else if (s.format == "csv") {
      std::cout << "participant_id,samples_collected,expected,percentage,included\n"
                << report.participant_id << ',' << report.collected << ','
                << report.expected << ',' << pct_1dp(report.percentage) << ','
                << (report.included ? "true" : "false") << '\n';
    } else {
      std::printf("%-16s %10lld / %lld  %5s%%  %s\n", report.participant_id.c_str(),
                  static_cast<long long>(report.collected),
                  static_cast<long long>(report.expected),
                  pct_1dp(report.percentage).c_str(),
                  report.included ? "included" : "excluded");
    }
    return kExitOk;
  }

  const auto ids = log.participant_ids();
  if (ids.empty()) {
    if (s.format == "json") {
      std::cout << nlohmann::json{{"reports", nlohmann::json::array()}}.dump(2) << "\n";
    } else if (s.format == "csv") {
      std::cout << "participant_id,samples_collected,expected,percentage,included\n";
    } else {
      std::printf("%-16s %10s %10s %8s  %s\n", "participant", "collected", "expected",
                  "percent", "included");
    }
    return kExitOk;
  }
  std::vector<CompletenessReport> reports;
  StudyWindow window = derive_window(log, s, start, end);
  for (const std::string& id : ids) {
    reports.push_back(completeness(log.load_series(id), window,
                                   s.sampling.nominal_period, s.threshold_pct));
  }
  std::sort(reports.begin(), reports.end(),
            [](const CompletenessReport& a, const CompletenessReport& b) {
              if (a.collected != b.collected) return a.collected < b.collected;
              return a.participant_id < b.participant_id;
            });

  if (s.format == "json") {
    nlohmann::json doc;
    doc["window"] = {{"start", window.start.to_rfc3339()},
                     {"end", window.end.to_rfc3339()}};
    auto& arr = doc["reports"] = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(completeness_to_json(r));
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }

  // Union of report dates, for the daily matrix columns.
  std::vector<LocalDate> dates;
  for (const auto& r : reports) {
    for (const auto& [date, n] : r.daily_counts) {
      (void)n;
      if (std::find(dates.begin(), dates.end(), date) == dates.end()) {
        dates.push_back(date);
      }
    }
  }
  std::sort(dates.begin(), dates.end());

  if (s.format == "csv") {
    std::cout << "participant_id,samples_collected,expected,percentage,included\n";
    for (const auto& r : reports) {
      std::cout << r.participant_id << ',' << r.collected << ',' << r.expected << ','
                << pct_1dp(r.percentage) << ',' << (r.included ? "true" : "false")
                << '\n';
    }
    std::cout << '\n' << "participant_id";
    for (const auto& d : dates) std::cout << ',' << to_string(d);
    std::cout << '\n';
    for (const auto& r : reports) {
      std::cout << r.participant_id;
      for (const auto& d : dates) {
        auto it = r.daily_counts.find(d);
        std::cout << ',' << (it == r.daily_counts.end() ? 0 : it->second);
      }
      std::cout << '\n';
    }
  } else {
    std::printf("%-16s %10s %10s %8s  %s\n", "participant", "collected", "expected",
                "percent", "included");
    for (const auto& r : reports) {
      std::printf("%-16s %10lld %10lld %7s%%  %s\n", r.participant_id.c_str(),
                  static_cast<long long>(r.collected),
                  static_cast<long long>(r.expected), pct_1dp(r.percentage).c_str(),
                  r.included ? "yes" : "no");
    }
    std::printf("\ndaily samples\n%-16s", "participant");
    for (const auto& d : dates) std::printf(" %10s", to_string(d).c_str());
    std::printf("\n");
    for (const auto& r : reports) {
      std::printf("%-16s", r.participant_id.c_str());
      for (const auto& d : dates) {
        auto it = r.daily_counts.find(d);
        std::printf(" %10lld",
                    static_cast<long long>(it == r.daily_counts.end() ? 0 : it->second));
      }
      std::printf("\n");
    }
  }
  return kExitOk;
}

// ---- detect ----------------------------------------------------------

int cmd_detect(const Settings& s, const std::string& participant, bool force,
               bool hour_bins, const std::optional<std::string>& svg_dir,
               const std::optional<OffsetTime>& start,
               const std::optional<OffsetTime>& end) {
  SampleLog log(s.data_dir);
  auto series = log.load_series(participant);

  if (!force) {
    if (series.empty()) {
      std::cerr << "mealtrace: " << participant
                << " has no samples; use --force to analyze anyway\n";
      return kExitExcluded;
    }
    StudyWindow window = start && end
                             ? StudyWindow::make(*start, *end)
                             : StudyWindow::make(series.samples().front().timestamp,
                                                 series.samples().back().timestamp +
                                                     s.sampling.nominal_period);
    auto report = completeness(series, window, s.sampling.nominal_period, s.threshold_pct);
    if (!report.included) {
      std::cerr << "mealtrace: " << participant << " excluded by completeness ("
                << pct_1dp(report.percentage) << "% <= " << pct_1dp(s.threshold_pct)
                << "%); use --force to analyze anyway\n";
      return kExitExcluded;
    }
  }

  auto analysis = analyze(series, s.sampling, s.detector);

  if (svg_dir) {
    std::filesystem::create_directories(*svg_dir);
    std::vector<double> sigmas;
    sigmas.reserve(analysis.std_points.size());
    for (const auto& p : analysis.std_points) sigmas.push_back(p.sigma);
    auto write_file = [&](const std::string& name, const std::string& body) {
      const auto path = std::filesystem::path(*svg_dir) / name;
      std::ofstream out(path);
      if (!out) fail(ErrorCode::storage_failure, "cannot write " + path.string());
      out << body;
    };
    write_file("routine_" + participant + ".svg",
               svg::routine_chart(*analysis.routine, "mealtime routine " + participant));
    write_file("boxplot_" + participant + ".svg",
               svg::sigma_boxplot(sigmas, analysis.fences, analysis.outliers,
                                  "sigma boxplot " + participant));
    write_file("timeseries_" + participant + ".svg",
               svg::timeseries_chart(series, analysis.segments, analysis.candidates,
                                     "blood glucose " + participant));
  }

  if (hour_bins) {
    for (std::size_t h = 0; h < 24; ++h) {
      std::cout << analysis.routine->counts[h] << (h + 1 < 24 ? ' ' : '\n');
    }
  } else {
    std::cout << analysis_document(participant, analysis);
  }
  return kExitOk;
}

// ---- simulate --------------------------------------------------------

int cmd_simulate(const std::string& profile_path, std::string out_csv,
                 std::string out_truth) {
  auto profile = load_profile(profile_path);
  auto result = synth::generate(profile);

  if (out_csv.empty()) out_csv = profile.participant_id + ".csv";
  if (out_truth.empty()) out_truth = profile.participant_id + ".truth.json";

  std::ofstream csv(out_csv);
  if (!csv) fail(ErrorCode::storage_failure, "cannot write " + out_csv);
  write_samples_csv(csv, result.series);

  std::ofstream truth(out_truth);
  if (!truth) fail(ErrorCode::storage_failure, "cannot write " + out_truth);
  truth << truth_document(result.truth);

  std::cerr << "mealtrace: wrote " << result.series.size() << " samples to " << out_csv
            << " and " << result.truth.size() << " onsets to " << out_truth << "\n";
  return kExitOk;
}

// ---- serve -----------------------------------------------------------

int cmd_serve(const Settings& s) {
  auto [host, port] = split_addr(s.addr);
  ServiceConfig config;
  config.host = host;
  config.port = port;
  config.data_dir = s.data_dir;
  config.sampling = s.sampling;
  config.detector = s.detector;
  Service service(std::move(config));
  std::cerr << "mealtrace: serving " << s.data_dir << " on " << host << ":" << port
            << "\n";
  service.run();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CGM mealtime-routine analytics"};
  app.require_subcommand(1);

  std::string flag_data_dir, flag_config, flag_format;
  auto* opt_data_dir = app.add_option("--data-dir", flag_data_dir, "sample store directory");
  app.add_option("--config", flag_config, "flat key=value config file");
  auto* opt_format =
      app.add_option("--format", flag_format, "output format: table, csv or json")
          ->check(CLI::IsMember({"table", "csv", "json"}));

  auto* ingest = app.add_subcommand("ingest", "append CSV/JSONL sample files to the store");
  std::vector<std::string> ingest_files;
  ingest->add_option("files", ingest_files, "input files")->required()->expected(-1);

  auto* audit = app.add_subcommand("audit", "data-completeness report for stored participants");
  std::string audit_start, audit_end, audit_participant;
  double audit_period = 0.0, audit_threshold = 0.0;
  auto* opt_audit_start = audit->add_option("--start", audit_start, "window start (RFC3339)");
  auto* opt_audit_end = audit->add_option("--end", audit_end, "window end (RFC3339)");
  auto* opt_audit_period = audit->add_option("--period", audit_period, "nominal period, seconds");
  auto* opt_audit_threshold =
      audit->add_option("--threshold", audit_threshold, "inclusion threshold, percent");
  auto* opt_audit_participant =
      audit->add_option("--participant", audit_participant, "report a single participant");

  auto* detect = app.add_subcommand("detect", "run the mealtime detector for one participant");
  std::string detect_participant, detect_svg, detect_start, detect_end;
  int detect_window_len = 0;
  double detect_iqr = 0.0, detect_merge_gap = 0.0;
  detect->add_option("--participant", detect_participant, "participant id")->required();
  auto* opt_svg = detect->add_option("--svg", detect_svg, "emit SVG charts into this directory");
  auto* opt_force = detect->add_flag("--force", "analyze even below the completeness gate");
  auto* opt_hour_bins = detect->add_flag("--hour-bins", "print the 24 hour-bin counts only");
  auto* opt_window_len = detect->add_option("--window-len", detect_window_len, "sliding window length");
  auto* opt_iqr = detect->add_option("--iqr-factor", detect_iqr, "IQR fence factor");
  auto* opt_merge_gap = detect->add_option("--merge-gap", detect_merge_gap, "event merge gap, minutes");
  auto* opt_no_positive = detect->add_flag("--no-positive-filter", "keep falling-edge outliers as candidates");
  auto* opt_detect_start = detect->add_option("--start", detect_start, "gate window start (RFC3339)");
  auto* opt_detect_end = detect->add_option("--end", detect_end, "gate window end (RFC3339)");

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic CGM trace from a profile");
  std::string sim_profile, sim_out_csv, sim_out_truth;
  simulate->add_option("profile", sim_profile, "profile JSON file")->required();
  simulate->add_option("--out-csv", sim_out_csv, "series CSV path (default <id>.csv)");
  simulate->add_option("--out-truth", sim_out_truth, "truth JSON path (default <id>.truth.json)");

  auto* serve = app.add_subcommand("serve", "run the HTTP collector/query service");
  std::string serve_addr;
  auto* opt_addr = serve->add_option("--addr", serve_addr, "bind address host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    // Precedence: defaults < config file < environment < flags.
    Settings settings;
    if (!flag_config.empty()) apply_config_file(settings, flag_config);
    if (const char* env = std::getenv("MEALTRACE_DATA_DIR")) settings.data_dir = env;
    if (const char* env = std::getenv("MEALTRACE_ADDR")) settings.addr = env;
    if (opt_data_dir->count() > 0) settings.data_dir = flag_data_dir;
    if (opt_format->count() > 0) settings.format = flag_format;
    if (settings.format != "table" && settings.format != "csv" && settings.format != "json") {
      fail(ErrorCode::parse_error, "format must be table, csv or json");
    }

    if (app.got_subcommand(ingest)) {
      settings.sampling.validate();
      return cmd_ingest(settings, ingest_files);
    }

    if (app.got_subcommand(audit)) {
      if (opt_audit_period->count() > 0) {
        settings.sampling.nominal_period =
            std::chrono::seconds(static_cast<std::int64_t>(audit_period));
        if (settings.sampling.contiguity_tolerance < settings.sampling.nominal_period) {
          settings.sampling.contiguity_tolerance = settings.sampling.nominal_period;
        }
      }
      if (opt_audit_threshold->count() > 0) settings.threshold_pct = audit_threshold;
      settings.sampling.validate();
      std::optional<OffsetTime> start, end;
      if (opt_audit_start->count() > 0) start = parse_time_flag(audit_start, "--start");
      if (opt_audit_end->count() > 0) end = parse_time_flag(audit_end, "--end");
      std::optional<std::string> participant;
      if (opt_audit_participant->count() > 0) participant = audit_participant;
      return cmd_audit(settings, start, end, participant);
    }

    if (app.got_subcommand(detect)) {
      if (opt_window_len->count() > 0) settings.detector.window_len = detect_window_len;
      if (opt_iqr->count() > 0) settings.detector.iqr_factor = detect_iqr;
      if (opt_merge_gap->count() > 0) {
        settings.detector.merge_gap =
            std::chrono::seconds(static_cast<std::int64_t>(detect_merge_gap * 60.0));
      }
      if (opt_no_positive->count() > 0) settings.detector.require_positive_delta = false;
      settings.sampling.validate();
      settings.detector.validate();
      std::optional<OffsetTime> start, end;
      if (opt_detect_start->count() > 0) start = parse_time_flag(detect_start, "--start");
      if (opt_detect_end->count() > 0) end = parse_time_flag(detect_end, "--end");
      if (start.has_value() != end.has_value()) {
        fail(ErrorCode::parse_error, "--start and --end must be given together");
      }
      std::optional<std::string> svg_dir;
      if (opt_svg->count() > 0) svg_dir = detect_svg;
      return cmd_detect(settings, detect_participant, opt_force->count() > 0,
                        opt_hour_bins->count() > 0, svg_dir, start, end);
    }

    if (app.got_subcommand(simulate)) {
      return cmd_simulate(sim_profile, sim_out_csv, sim_out_truth);
    }

    if (app.got_subcommand(serve)) {
      if (opt_addr->count() > 0) settings.addr = serve_addr;
      settings.sampling.validate();
      settings.detector.validate();
      return cmd_serve(settings);
    }
  } catch (const Error& e) {
    std::cerr << "mealtrace: error: " << e.what() << " [" << to_string(e.code()) << "]\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "mealtrace: error: " << e.what() << "\n";
    return kExitStorage;
  }
  return kExitUsage;
}
