#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pgreserve/config.hpp"
#include "pgreserve/ingest.hpp"
#include "pgreserve/output.hpp"
#include "pgreserve/simulator.hpp"
#include "pgreserve/surface.hpp"

namespace pgreserve {

/// Days [delivery_day - training_days, delivery_day - 1] clipped to the log range.
std::vector<int> training_window(const IngestResult& logs, int delivery_day, int training_days);

struct ForecastOutcome
{
  std::string model;
  int delivery_day = 0;
  std::vector<int> training_days;
  std::vector<double> supply_hourly;   // 24 predictions, floored at 0
  std::vector<double> demand_hourly;
  double supply_sum = 0.0;
  double demand_sum = 0.0;
  std::int64_t supply = 0;             // S, rounded
  double demand = 0.0;                 // Q
};

SurfaceModel fit_surface(const ForecastSpec& spec, std::span<const SurfacePoint> data);

ForecastOutcome forecast_market(std::span<const HourlyAggregate> aggregates, int delivery_day,
                                std::span<const int> training_days, const ForecastSpec& spec);

struct GridStat
{
  std::optional<double> avg;
  std::optional<double> std;
  std::string error;
};

struct GridRow
{
  std::string model;
  GridStat demand;
  GridStat supply;
};

/// Every PNR(p, q) for p, q in 1..5 followed by LQR, each scored by
/// leave-one-day-out relative L2 error over the training days.
std::vector<GridRow> forecast_grid(std::span<const HourlyAggregate> aggregates,
                                   std::span<const int> training_days, double lqr_bandwidth);

std::vector<AuctionObservation> window_auctions(const IngestResult& logs, std::span<const int> days);

EmpiricalCurves fit_empirical_curves(std::span<const AuctionObservation> auctions, const CurveSpec& spec,
                                     std::uint64_t seed);

/// Curves table in CPM: xi, phi, psi, pi at the fitted knots.
Table curves_table(const EmpiricalCurves& curves);
EmpiricalCurves curves_from_table(const Table& table);

AuctionCurves make_auction_curves(const CurveSpec& spec, const EmpiricalCurves* fitted);
PriceModel make_price_model(const PriceSpec& spec, std::span<const AuctionObservation> observed);

/// One line of the comparison report.
struct RunSummary
{
  std::string label;
  double r_rtb = 0.0;
  double r_pg_rtb = 0.0;
  std::optional<double> uplift;
  int runs = 1;
  double dominance_fraction = 0.0;
  std::optional<double> realized_r_rtb;
};

/// (predicted - realized) / realized; empty without a usable realized value.
std::optional<double> prediction_error(double predicted, std::optional<double> realized);
RunSummary summary_from_report(const nlohmann::json& report, const std::string& label);
/// One row per run plus an "all" row; dominance and prediction error per row.
Table comparison_table(std::span<const RunSummary> runs);

struct CommandOptions
{
  Format format = Format::Csv;
  bool grid = false;
};

/// The CLI subcommands over one RunConfig. Each returns the files it wrote.
class Pipeline
{
public:
  Pipeline(RunConfig config, CommandOptions options, std::ostream& log);
  ~Pipeline();

  std::vector<std::filesystem::path> ingest();
  std::vector<std::filesystem::path> forecast();
  std::vector<std::filesystem::path> fit_curves();
  std::vector<std::filesystem::path> price();
  std::vector<std::filesystem::path> simulate();
  /// Reads report.json from each run directory (the output directory when empty).
  std::vector<std::filesystem::path> report(const std::vector<std::filesystem::path>& run_dirs);

  const RunConfig& config() const { return config_; }

private:
  const IngestResult& logs();
  int delivery_day();
  std::vector<int> training_days();
  MarketForecast market();
  AuctionCurves auction_curves();

  RunConfig config_;
  CommandOptions options_;
  std::ostream& log_;
  OutputDir out_;
  std::unique_ptr<IngestResult> logs_;
};

} // namespace pgreserve
