#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pgreserve/lowess.hpp"
#include "pgreserve/pricing.hpp"

namespace pgreserve {

struct ForecastSpec
{
  enum class Model
  {
    Pnr,
    Lqr,
  };
  Model model = Model::Pnr;
  int p = 1;
  int q = 5;
  double bandwidth = 0.3;
  /// Fixed S and Q that bypass the log-based forecast.
  std::optional<std::int64_t> supply;
  std::optional<double> demand;

  std::string name() const;
};

struct CurveSpec
{
  enum class Source
  {
    Empirical,
    Uniform,
    LogNormal,
  };
  Source source = Source::Empirical;
  double v = 1.0;        // uniform upper bound, CPM
  double mu = 0.0;       // log-normal over CPM values
  double sigma = 0.5;
  RlwrOptions rlwr;
  double resample_rate = 1.5;
};

struct PriceSpec
{
  enum class Kind
  {
    LogNormalFit,   // fitted to observed winning bids
    Empirical,      // bootstrap of observed winning bids
    LogNormal,
    Uniform,
    Constant,
  };
  Kind kind = Kind::LogNormalFit;
  double a = 0.0;   // CPM: constant price, uniform lo, or log-normal mu (log CPM)
  double b = 0.0;   // CPM: uniform hi, or log-normal sigma
};

struct SimulatorSpec
{
  enum class Intensity
  {
    DemandOverHorizon,   // Q / T
    DemandTimesHorizon,  // Q * T
  };
  std::optional<double> arrival_rate;
  Intensity intensity = Intensity::DemandOverHorizon;
  PriceSpec prices;
  int runs = 1;
};

/// Everything a pipeline run depends on. Paths are resolved against the
/// config file's directory.
struct RunConfig
{
  std::vector<std::filesystem::path> logs;
  std::optional<std::string> slot;
  std::optional<int> delivery_day;
  std::optional<std::string> delivery_date;
  int training_days = 7;
  ForecastSpec forecast;
  CurveSpec curves;
  RiskParams risk;
  double sale_end = 7.0;
  double delivery_end = 8.0;
  SimulatorSpec simulator;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";

  /// FNV-1a of the canonical form, 16 hex digits.
  std::string hash() const;
  std::string canonical() const;
  void validate() const;
};

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

} // namespace pgreserve
