/*
 * mealtrace - blood glucose mealtime analytics
 *
 * Released under the Apache 2.0 Licence
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "test_support.hpp"

using namespace mealtrace;
using mealtrace::test::CliResult;
using mealtrace::test::TempDir;
using mealtrace::test::read_file;
using mealtrace::test::run_cli;
using mealtrace::test::ts;
using mealtrace::test::write_file;

namespace {

/// CSV with `n` rows for one participant at 5-minute cadence.
std::string csv_rows(const std::string& id, const std::string& start, int n,
                     double value = 6.0) {
  std::ostringstream out;
  out << "participant_id,timestamp,glucose_mmol_l\n";
  const OffsetTime t0 = ts(start);
  for (int i = 0; i < n; ++i) {
    out << id << ',' << (t0 + std::chrono::seconds(300 * i)).to_rfc3339() << ','
        << value << '\n';
  }
  return out.str();
}

std::string meal_profile(const std::string& id, int days, std::uint64_t seed,
                         const std::string& extra = "") {
  return std::string("{\n") + "  \"participant_id\": \"" + id + "\",\n" +
         "  \"baseline\": 6.0,\n" +
         "  \"meals\": [\n"
         "    {\"clock_time\": \"08:00\", \"rise\": 4.0, \"rise_duration_min\": 30, \"decay_halflife_min\": 60},\n"
         "    {\"clock_time\": \"17:00\", \"rise\": 5.0, \"rise_duration_min\": 30, \"decay_halflife_min\": 60}\n"
         "  ],\n" +
         "  \"noise_sd\": 0.15,\n  \"days\": " + std::to_string(days) +
         ",\n  \"period_s\": 300,\n  \"offset\": \"-04:00\",\n"
         "  \"start_date\": \"2024-06-01\",\n  \"seed\": " + std::to_string(seed) +
         (extra.empty() ? "" : ",\n" + extra) + "\n}\n";
}

}  // namespace

TEST_CASE("ingest accepts a fresh file and dedups a re-run") {
  TempDir dir;
  const auto csv = dir.path() / "p1.csv";
  write_file(csv, csv_rows("p1", "2024-06-01T08:00:00-04:00", 100));

  auto first = run_cli("--data-dir " + dir.str() + "/store --format json ingest " + csv.string());
  CHECK(first.exit_code == 0);
  auto rows = nlohmann::json::parse(first.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["participant_id"] == "p1");
  CHECK(rows[0]["accepted"] == 100);
  CHECK(rows[0]["duplicates"] == 0);

  auto second = run_cli("--data-dir " + dir.str() + "/store --format json ingest " + csv.string());
  CHECK(second.exit_code == 0);
  rows = nlohmann::json::parse(second.out);
  CHECK(rows[0]["accepted"] == 0);
  CHECK(rows[0]["duplicates"] == 100);
}

TEST_CASE("ingest reads jsonl too") {
  TempDir dir;
  const auto jsonl = dir.path() / "p2.jsonl";
  write_file(jsonl,
             R"({"participant_id":"p2","timestamp":"2024-06-01T08:00:00-04:00","glucose_mmol_l":6.0})"
             "\n"
             R"({"participant_id":"p2","timestamp":"2024-06-01T08:05:00-04:00","glucose_mmol_l":6.4})"
             "\n");
  auto result = run_cli("--data-dir " + dir.str() + "/store --format json ingest " + jsonl.string());
  CHECK(result.exit_code == 0);
  CHECK(nlohmann::json::parse(result.out)[0]["accepted"] == 2);
}

TEST_CASE("ingest rejects non-positive glucose with file and line") {
  TempDir dir;
  const auto csv = dir.path() / "bad.csv";
  write_file(csv,
             "participant_id,timestamp,glucose_mmol_l\n"
             "p1,2024-06-01T08:00:00-04:00,6.0\n"
             "p1,2024-06-01T08:05:00-04:00,0\n");
  auto result = run_cli("--data-dir " + dir.str() + "/store ingest " + csv.string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("bad.csv:3") != std::string::npos);
}

TEST_CASE("ingest conflict exits with the storage code") {
  TempDir dir;
  const auto a = dir.path() / "a.csv";
  const auto b = dir.path() / "b.csv";
  write_file(a, csv_rows("p1", "2024-06-01T08:00:00-04:00", 3, 6.0));
  write_file(b, csv_rows("p1", "2024-06-01T08:00:00-04:00", 3, 7.0));
  CHECK(run_cli("--data-dir " + dir.str() + "/store ingest " + a.string()).exit_code == 0);
  auto conflicted = run_cli("--data-dir " + dir.str() + "/store ingest " + b.string());
  CHECK(conflicted.exit_code == 5);
  CHECK(conflicted.err.find("conflicting_duplicate") != std::string::npos);
}

TEST_CASE("audit reproduces study-scale percentages") {
  TempDir dir;
  const std::string store = dir.str() + "/store";
  struct Fixture {
    const char* id;
    int collected;
  };
  // Same collected counts as the completeness fixtures in unit_audit.
  const Fixture fixtures[] = {{"pa", 2425}, {"pb", 2729}, {"pc", 146}, {"pd", 2760},
                              {"pe", 220},  {"pf", 132},  {"pg", 2749}};
  for (const auto& f : fixtures) {
    const auto csv = dir.path() / (std::string(f.id) + ".csv");
    write_file(csv, csv_rows(f.id, "2024-03-01T12:00:00-04:00", f.collected));
    REQUIRE(run_cli("--data-dir " + store + " ingest " + csv.string()).exit_code == 0);
  }

  auto result = run_cli("--data-dir " + store +
                        " --format json audit --start 2024-03-01T12:00:00-04:00"
                        " --end 2024-03-11T12:00:00-04:00");
  REQUIRE(result.exit_code == 0);
  auto doc = nlohmann::json::parse(result.out);
  const auto& reports = doc["reports"];
  REQUIRE(reports.size() == 7);

  // Ascending by collected, percentages after half-up rounding.
  const std::vector<double> expected_pct = {4.6, 5.1, 7.6, 84.2, 94.8, 95.5, 95.8};
  const std::vector<int> expected_collected = {132, 146, 220, 2425, 2729, 2749, 2760};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i]["collected"] == expected_collected[i]);
    CHECK(reports[i]["expected"] == 2880);
    CHECK(reports[i]["percentage"] == expected_pct[i]);
    CHECK(reports[i]["included"] == (expected_pct[i] > 50.0));
  }

  SUBCASE("csv format mirrors the table schema") {
    auto csv_out = run_cli("--data-dir " + store +
                           " --format csv audit --start 2024-03-01T12:00:00-04:00"
                           " --end 2024-03-11T12:00:00-04:00");
    REQUIRE(csv_out.exit_code == 0);
    CHECK(csv_out.out.rfind("participant_id,samples_collected,expected,percentage,included\n",
                            0) == 0);
    CHECK(csv_out.out.find("pf,132,2880,4.6,false") != std::string::npos);
    CHECK(csv_out.out.find("pd,2760,2880,95.8,true") != std::string::npos);
  }
  SUBCASE("malformed window flag") {
    auto bad = run_cli("--data-dir " + store + " audit --start not-a-time"
                       " --end 2024-03-11T12:00:00-04:00");
    CHECK(bad.exit_code == 2);
  }
}

TEST_CASE("audit of an empty store prints an empty table") {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "store");
  auto result = run_cli("--data-dir " + dir.str() + "/store audit");
  CHECK(result.exit_code == 0);

  auto json_result = run_cli("--data-dir " + dir.str() + "/store --format json audit");
  CHECK(json_result.exit_code == 0);
  CHECK(nlohmann::json::parse(json_result.out)["reports"].empty());
}

TEST_CASE("detect applies the completeness gate") {
  TempDir dir;
  const std::string store = dir.str() + "/store";
  const auto csv = dir.path() / "sparse.csv";
  // 132 samples in a 2880-slot window: 4.6%, excluded.
  write_file(csv, csv_rows("sparse", "2024-03-01T12:00:00-04:00", 132));
  REQUIRE(run_cli("--data-dir " + store + " ingest " + csv.string()).exit_code == 0);

  auto gated = run_cli("--data-dir " + store +
                       " detect --participant sparse"
                       " --start 2024-03-01T12:00:00-04:00 --end 2024-03-11T12:00:00-04:00");
  CHECK(gated.exit_code == 3);
  CHECK(gated.err.find("excluded") != std::string::npos);

  // Constant data passes the gate under --force but yields no candidates.
  auto forced = run_cli("--data-dir " + store +
                        " detect --participant sparse --force"
                        " --start 2024-03-01T12:00:00-04:00 --end 2024-03-11T12:00:00-04:00");
  CHECK(forced.exit_code == 4);
  CHECK(forced.err.find("no_candidates") != std::string::npos);
}

TEST_CASE("detect unknown participant is a storage error") {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "store");
  auto result = run_cli("--data-dir " + dir.str() + "/store detect --participant ghost");
  CHECK(result.exit_code == 5);
}

TEST_CASE("detect emits the analysis document, hour bins, and svg files") {
  TempDir dir;
  const std::string store = dir.str() + "/store";
  const auto profile = dir.path() / "profile.json";
  write_file(profile, meal_profile("mealy", 5, 11));
  const auto csv = dir.path() / "mealy.csv";
  REQUIRE(run_cli("simulate " + profile.string() + " --out-csv " + csv.string() +
                  " --out-truth " + (dir.path() / "truth.json").string())
              .exit_code == 0);
  REQUIRE(run_cli("--data-dir " + store + " ingest " + csv.string()).exit_code == 0);

  auto result = run_cli("--data-dir " + store + " detect --participant mealy --svg " +
                        dir.str() + "/charts");
  REQUIRE(result.exit_code == 0);
  auto doc = nlohmann::json::parse(result.out);
  CHECK(doc["participant_id"] == "mealy");
  CHECK(doc["routine"]["counts"].size() == 24);
  CHECK(doc["fences"].contains("upper"));
  CHECK(doc["events"].size() >= 5);  // two meals a day over five days

  for (const char* name : {"routine_mealy.svg", "boxplot_mealy.svg", "timeseries_mealy.svg"}) {
    const auto path = dir.path() / "charts" / name;
    INFO(name);
    CHECK(std::filesystem::exists(path));
    CHECK(read_file(path).rfind("<svg", 0) == 0);
  }

  auto bins = run_cli("--data-dir " + store + " detect --participant mealy --hour-bins");
  REQUIRE(bins.exit_code == 0);
  std::istringstream in(bins.out);
  std::int64_t total = 0, value = 0;
  int bins_read = 0;
  while (in >> value) {
    total += value;
    ++bins_read;
  }
  CHECK(bins_read == 24);
  CHECK(total == static_cast<std::int64_t>(doc["candidates"].size()));
}

TEST_CASE("simulate is deterministic and honors block gaps") {
  TempDir dir;
  const auto profile = dir.path() / "profile.json";
  write_file(profile, meal_profile("simp", 4, 21,
                                   "  \"dropout\": {\"block_gaps\": "
                                   "[{\"start_s\": 172800, \"duration_s\": 86400}]}"));
  const auto csv_a = dir.path() / "a.csv";
  const auto csv_b = dir.path() / "b.csv";
  REQUIRE(run_cli("simulate " + profile.string() + " --out-csv " + csv_a.string() +
                  " --out-truth " + (dir.path() / "ta.json").string())
              .exit_code == 0);
  REQUIRE(run_cli("simulate " + profile.string() + " --out-csv " + csv_b.string() +
                  " --out-truth " + (dir.path() / "tb.json").string())
              .exit_code == 0);
  CHECK(read_file(csv_a) == read_file(csv_b));
  CHECK(read_file(dir.path() / "ta.json") == read_file(dir.path() / "tb.json"));

  // Day 3 was wiped; the audit daily matrix must show zero.
  const std::string store = dir.str() + "/store";
  REQUIRE(run_cli("--data-dir " + store + " ingest " + csv_a.string()).exit_code == 0);
  auto audit = run_cli("--data-dir " + store +
                       " --format json audit --start 2024-06-01T00:00:00-04:00"
                       " --end 2024-06-05T00:00:00-04:00");
  REQUIRE(audit.exit_code == 0);
  auto doc = nlohmann::json::parse(audit.out);
  CHECK(doc["reports"][0]["daily_counts"]["2024-06-03"] == 0);
  CHECK(doc["reports"][0]["daily_counts"]["2024-06-02"] == 288);
}

TEST_CASE("simulate without dropout yields the full budget") {
  TempDir dir;
  const auto profile = dir.path() / "profile.json";
  write_file(profile, meal_profile("full", 10, 3));
  const auto csv = dir.path() / "full.csv";
  REQUIRE(run_cli("simulate " + profile.string() + " --out-csv " + csv.string() +
                  " --out-truth " + (dir.path() / "t.json").string())
              .exit_code == 0);
  const std::string body = read_file(csv);
  CHECK(std::count(body.begin(), body.end(), '\n') == 2881);  // header + 2880 rows
}

TEST_CASE("invalid profile exits with the usage code") {
  TempDir dir;
  const auto profile = dir.path() / "profile.json";
  write_file(profile, "{\"baseline\": -1}\n");
  CHECK(run_cli("simulate " + profile.string()).exit_code == 2);
}

TEST_CASE("settings precedence: config < env < flag") {
  TempDir dir;
  const auto csv = dir.path() / "p.csv";
  write_file(csv, csv_rows("p1", "2024-06-01T08:00:00-04:00", 2));
  const auto config = dir.path() / "mealtrace.conf";
  write_file(config, "data_dir = " + dir.str() + "/from_config\n");

  REQUIRE(run_cli("--config " + config.string() + " ingest " + csv.string()).exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "from_config" / "p1.jsonl"));

  REQUIRE(run_cli("--config " + config.string() + " ingest " + csv.string(),
                  "MEALTRACE_DATA_DIR=" + dir.str() + "/from_env")
              .exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "from_env" / "p1.jsonl"));

  REQUIRE(run_cli("--config " + config.string() + " --data-dir " + dir.str() +
                      "/from_flag ingest " + csv.string(),
                  "MEALTRACE_DATA_DIR=" + dir.str() + "/from_env2")
              .exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "from_flag" / "p1.jsonl"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "from_env2"));
}

TEST_CASE("config file tunes the detector") {
  TempDir dir;
  const auto config = dir.path() / "bad.conf";
  write_file(config, "window_len = 1\n");
  const auto csv = dir.path() / "p.csv";
  write_file(csv, csv_rows("p1", "2024-06-01T08:00:00-04:00", 10));
  const std::string store = dir.str() + "/store";
  REQUIRE(run_cli("--data-dir " + store + " ingest " + csv.string()).exit_code == 0);
  auto result = run_cli("--config " + config.string() + " --data-dir " + store +
                        " detect --participant p1 --force");
  CHECK(result.exit_code == 2);  // invalid window_len from config

  auto unknown_key = run_cli("--config " + config.string() + "x --data-dir " + store +
                             " detect --participant p1");
  CHECK(unknown_key.exit_code == 2);  // missing config file
}

TEST_CASE("usage errors") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("--format yaml audit").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("detect").exit_code == 2);  // missing --participant
}
