#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pgreserve/error.hpp"
#include "pgreserve/pipeline.hpp"
#include "pgreserve/synthetic.hpp"

using namespace pgreserve;
namespace fs = std::filesystem;

namespace {

const char* kHeader = "timestamp,slot_id,bid_count,bids,winning_bid,payment,reserve\n";

IngestResult ingest_text(const std::string& text, std::optional<std::string> slot = std::nullopt)
{
  LogIngestor ing(std::move(slot));
  std::istringstream in(text);
  ing.add(in, "inline");
  return ing.finish();
}

fs::path scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / ("pgreserve_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the provenance header line and the JSON version field.
std::string without_version(const std::string& text)
{
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# pgreserve", 0) != 0 && line.find("\"version\"") == std::string::npos)
      out += line + "\n";
  return out;
}

fs::path write_demo(const fs::path& dir, int days = 8)
{
  SyntheticLogSpec spec;
  spec.days = days;
  spec.seed = 5;
  std::ofstream out(dir / "logs.csv");
  write_synthetic_log(out, spec);
  return dir / "logs.csv";
}

const char* kConfig = R"({
  "logs": ["logs.csv"],
  "delivery_day": 7,
  "forecast": {"model": "pnr", "p": 1, "q": 5},
  "curves": {"source": "empirical"},
  "simulator": {"runs": 4},
  "seed": 9,
  "out": "out"
})";

} // namespace

TEST_CASE("ingest rolls auctions up per hour")
{
  const auto r = ingest_text(std::string(kHeader) +
                             "2024-01-01T10:05:00,a,3,1;2;3,3,2,\n"
                             "2024-01-01T10:40:00,a,5,,6,5.0,\n");
  CHECK(r.aggregates.size() == 24);
  const auto& h = r.aggregates[10];
  CHECK(h.supply == 2);
  CHECK(h.demand == 8);
  CHECK(r.auctions[1].auction.payment == 0.005);
  CHECK(*h.avg_payment == doctest::Approx((0.002 + 0.005) / 2));
  CHECK_FALSE(r.aggregates[11].avg_payment.has_value());
  CHECK(r.first_date == "2024-01-01");
}

TEST_CASE("ingest covers the whole day-hour grid")
{
  std::string text = kHeader;
  for (int d = 1; d <= 8; ++d)
    for (int h = 0; h < 24; ++h) {
      char row[96];
      std::snprintf(row, sizeof row, "2024-02-%02dT%02d:30:00,a,2,1.5;1.0,1.5,1.0,\n", d, h);
      text += row;
    }
  const auto r = ingest_text(text);
  CHECK(r.aggregates.size() == 192);
  CHECK(r.last_day() == 7);
  CHECK(r.day_of("2024-02-08") == 7);
}

TEST_CASE("ingest tolerates a few malformed rows and filters slots")
{
  std::string text = kHeader;
  for (int i = 0; i < 200; ++i)
    text += "2024-01-01T01:00:00," + std::string(i % 2 ? "a" : "b") + ",2,,2.0,1.0,\n";
  text += "2024-01-01T01:00:00,a,2,,1.0,2.0,\n";   // payment above winning bid
  const auto r = ingest_text(text, "a");
  CHECK(r.malformed == 1);
  CHECK(r.auctions.size() == 100);

  std::string bad = kHeader;
  bad += "2024-01-01T01:00:00,a,2,,2.0,1.0,\n";
  bad += "not-a-time,a,2,,2.0,1.0,\n";
  CHECK_THROWS_AS(ingest_text(bad), DataError);
  CHECK_THROWS_AS(ingest_text(std::string(kHeader) + "2024-01-01T01:00:00,a,2,,2.0,1.0,\n", "zzz"), DataError);
  CHECK_THROWS_AS(ingest_text("timestamp,payment\n"), DataError);
}

TEST_CASE("config parsing")
{
  const auto dir = scratch("config");
  write_demo(dir, 3);
  const auto c = parse_config(kConfig, dir);
  CHECK(c.forecast.name() == "PNR(1,5)");
  CHECK(c.simulator.runs == 4);
  CHECK(c.out == dir / "out");
  CHECK(c.hash() == parse_config(kConfig, dir).hash());
  CHECK(c.hash().size() == 16);

  CHECK_THROWS_AS(parse_config("{", dir), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})", dir), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"logs": ["missing.csv"]})", dir), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"logs": "logs.csv", "risk": {"gamma": 2, "omega": 0.6}})", dir),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"logs": "logs.csv", "forecast": {"p": 6}})", dir), ValidationError);
  // Fully analytic runs need no logs.
  CHECK_NOTHROW(parse_config(R"({"forecast": {"supply": 10, "demand": 20}, "curves": {"source": "uniform"}})", dir));
}

TEST_CASE("linear traffic is forecast exactly by PNR(1,1)")
{
  std::vector<HourlyAggregate> aggs;
  for (int d = 0; d < 7; ++d)
    for (int h = 0; h < 24; ++h)
      aggs.push_back({d, h, 100 + 3 * d + 2 * h, 400 + 5 * d + h, std::nullopt});
  const int days[] = {0, 1, 2, 3, 4, 5, 6};
  ForecastSpec spec;
  spec.p = 1;
  spec.q = 1;
  const auto fc = forecast_market(aggs, 7, days, spec);
  double s = 0.0, q = 0.0;
  for (int h = 0; h < 24; ++h) {
    s += 100 + 21 + 2 * h;
    q += 400 + 35 + h;
    CHECK(fc.supply_hourly[static_cast<std::size_t>(h)] == doctest::Approx(100 + 21 + 2 * h).epsilon(1e-9));
  }
  CHECK(fc.supply == static_cast<std::int64_t>(s));
  CHECK(fc.demand == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("forecast grid mirrors the evaluation table")
{
  std::istringstream in([] {
    std::ostringstream os;
    SyntheticLogSpec spec;
    spec.seed = 77;
    write_synthetic_log(os, spec);
    return os.str();
  }());
  LogIngestor ing;
  ing.add(in, "synthetic");
  const auto logs = ing.finish();
  const auto days = training_window(logs, 7, 7);
  CHECK(days.size() == 7);
  const auto grid = forecast_grid(logs.aggregates, days, 0.3);
  REQUIRE(grid.size() == 26);
  CHECK(grid[0].model == "PNR(1,1)");
  CHECK(grid[24].model == "PNR(5,5)");
  CHECK(grid[25].model == "LQR(0.3)");
  for (const auto& r : grid) {
    CHECK(r.demand.avg.has_value());
    CHECK(r.supply.std.has_value());
  }
  double best_low = HUGE_VAL, best_p5 = HUGE_VAL;
  for (int q = 0; q < 5; ++q) {
    best_low = std::min(best_low, *grid[static_cast<std::size_t>(q)].demand.avg);
    best_p5 = std::min(best_p5, *grid[static_cast<std::size_t>(20 + q)].demand.avg);
  }
  CHECK(best_low < best_p5);
}

TEST_CASE("curves table round-trips through CPM")
{
  EmpiricalCurves c;
  c.phi = FittedCurve({1.0, 2.0, 4.0}, {0.0, 0.001, 0.002});
  c.psi = FittedCurve({1.0, 3.0}, {0.0, 0.0005});
  c.pi = FittedCurve({1.0, 2.0, 4.0}, {0.0015, 0.002, 0.003});
  const auto t = curves_table(c);
  CHECK(t.rows.size() == 4);
  const auto back = curves_from_table(t);
  for (double x : {0.5, 1.0, 1.7, 2.5, 3.0, 3.9, 6.0}) {
    CHECK(back.phi(x) == doctest::Approx(c.phi(x)).epsilon(1e-14));
    CHECK(back.psi(x) == doctest::Approx(c.psi(x)).epsilon(1e-14));
    CHECK(back.pi(x) == doctest::Approx(c.pi(x)).epsilon(1e-14));
  }
}

TEST_CASE("comparison report")
{
  RunSummary single{"lambda0", 10.0, 12.0, 0.2, 1, 1.0, std::nullopt};
  const auto t = comparison_table(std::span(&single, 1));
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<double>(t.rows[0][5]) == 1.0);
  CHECK(std::get<std::string>(t.rows[0][7]) == "unavailable");
  CHECK(std::get<double>(t.rows[1][5]) == 1.0);

  CHECK(*prediction_error(10.0, 10.0) == 0.0);
  CHECK(*prediction_error(11.0, 10.0) == doctest::Approx(0.1));
  CHECK_FALSE(prediction_error(10.0, std::nullopt).has_value());
  CHECK_THROWS_AS(summary_from_report(nlohmann::json::object(), "x"), DataError);
  CHECK_THROWS_AS(comparison_table({}), ValidationError);
}

TEST_CASE("pipeline outputs are deterministic")
{
  std::vector<std::string> first;
  for (int rep = 0; rep < 2; ++rep) {
    const auto dir = scratch("pipeline" + std::to_string(rep));
    write_demo(dir);
    std::ostringstream log;
    Pipeline p(parse_config(kConfig, dir), CommandOptions{Format::Csv, true}, log);
    std::vector<fs::path> files;
    for (auto step : {&Pipeline::ingest, &Pipeline::forecast, &Pipeline::fit_curves, &Pipeline::price,
                      &Pipeline::simulate})
      for (const auto& f : (p.*step)())
        files.push_back(f);
    for (const auto& f : p.report({}))
      files.push_back(f);
    CHECK(files.size() == 9);

    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto text = slurp(files[i]);
      const bool stamped = text.find("config=") != std::string::npos || text.find("config_hash") != std::string::npos;
      CHECK(stamped);
      if (rep == 0)
        first.push_back(without_version(text));
      else
        CHECK(without_version(text) == first[i]);
    }
  }
}

TEST_CASE("price needs upstream artifacts")
{
  const auto dir = scratch("upstream");
  write_demo(dir, 3);
  std::ostringstream log;
  Pipeline p(parse_config(kConfig, dir), CommandOptions{}, log);
  CHECK_THROWS_AS(p.price(), DataError);
}

TEST_CASE("command-line exit codes")
{
  const auto dir = scratch("exit");
  write_demo(dir, 3);
  const std::string tool = PGRESERVE_TOOL;
  const auto run = [&](const std::string& args) {
    const int rc = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  {
    std::ofstream(dir / "bad.json") << R"({"risk": {"lambda": -1}, "logs": "logs.csv"})";
    std::ofstream(dir / "ok.json") << kConfig;
    std::ofstream(dir / "analytic.json")
      << R"({"forecast": {"supply": 50, "demand": 120}, "curves": {"source": "uniform", "v": 2},
             "simulator": {"price_model": {"kind": "uniform", "lo": 0, "hi": 2}}, "out": "analytic"})";
  }
  const auto d = dir.string();
  CHECK(run("price --config " + d + "/bad.json") == 2);
  CHECK(run("price --config " + d + "/ok.json") == 3);
  CHECK(run("frobnicate") == 2);
  CHECK(run("price --config " + d + "/ok.json --format xml") == 2);
  CHECK(run("price --config " + d + "/analytic.json") == 0);
  CHECK(run("simulate --config " + d + "/analytic.json --seed 3 --format json") == 0);
  CHECK(fs::exists(dir / "analytic" / "trace.json"));
  CHECK(run("report --config " + d + "/analytic.json") == 0);
}
