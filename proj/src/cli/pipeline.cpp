#include <algorithm>
#include <cmath>
#include <map>

#include "pgreserve/error.hpp"
#include "pgreserve/pipeline.hpp"

namespace pgreserve {

using nlohmann::json;

std::vector<int> training_window(const IngestResult& logs, int delivery_day, int training_days)
{
  std::vector<int> days;
  for (int d = std::max(0, delivery_day - training_days); d < delivery_day; ++d)
    if (d <= logs.last_day())
      days.push_back(d);
  if (days.size() < 2)
    throw DataError("forecasting needs at least two training days before day " + std::to_string(delivery_day));
  return days;
}

SurfaceModel fit_surface(const ForecastSpec& spec, std::span<const SurfacePoint> data)
{
  return spec.model == ForecastSpec::Model::Pnr ? fit_pnr(data, spec.p, spec.q)
                                                : fit_lqr(data, spec.bandwidth);
}

namespace {

std::vector<SurfacePoint> points(std::span<const HourlyAggregate> aggregates, std::span<const int> days,
                                 bool supply)
{
  std::vector<SurfacePoint> pts;
  for (const auto& a : aggregates)
    if (std::find(days.begin(), days.end(), a.day) != days.end())
      pts.push_back({static_cast<double>(a.day), static_cast<double>(a.hour),
                     static_cast<double>(supply ? a.supply : a.demand)});
  return pts;
}

GridStat score(const ForecastSpec& spec, std::span<const HourlyAggregate> aggregates,
               std::span<const int> days, bool supply)
{
  GridStat g;
  std::vector<double> errs;
  try {
    for (int held : days) {
      std::vector<int> rest;
      for (int d : days)
        if (d != held)
          rest.push_back(d);
      const int one[] = {held};
      const auto model = fit_surface(spec, points(aggregates, rest, supply));
      const auto e = l2_eval(model, points(aggregates, one, supply));
      if (e.days_used > 0)
        errs.push_back(e.l2_avg);
    }
  } catch (const Error& e) {
    g.error = e.what();
    return g;
  }
  if (errs.empty()) {
    g.error = "no held-out day with activity";
    return g;
  }
  double m = 0.0;
  for (double e : errs)
    m += e;
  m /= static_cast<double>(errs.size());
  double ss = 0.0;
  for (double e : errs)
    ss += (e - m) * (e - m);
  g.avg = m;
  g.std = errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1)) : 0.0;
  return g;
}

double sum(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s;
}

Cell opt_cell(const std::optional<double>& v)
{
  return v ? Cell(*v) : Cell(std::monostate{});
}

json opt_json(const std::optional<double>& v)
{
  return v ? json(*v) : json(nullptr);
}

} // namespace

ForecastOutcome forecast_market(std::span<const HourlyAggregate> aggregates, int delivery_day,
                                std::span<const int> training_days, const ForecastSpec& spec)
{
  ForecastOutcome out;
  out.model = spec.name();
  out.delivery_day = delivery_day;
  out.training_days.assign(training_days.begin(), training_days.end());

  std::vector<SurfacePoint> queries;
  for (int h = 0; h < 24; ++h)
    queries.push_back({static_cast<double>(delivery_day), static_cast<double>(h), 0.0});

  for (bool supply : {true, false}) {
    const auto model = fit_surface(spec, points(aggregates, training_days, supply));
    auto pred = predict_all(model, queries);
    for (auto& p : pred)
      p = std::max(p, 0.0);
    (supply ? out.supply_hourly : out.demand_hourly) = pred;
  }
  out.supply_sum = sum(out.supply_hourly);
  out.demand_sum = sum(out.demand_hourly);
  out.supply = std::llround(out.supply_sum);
  out.demand = out.demand_sum;
  if (out.supply <= 0)
    throw DataError(out.model + " forecasts no supply for day " + std::to_string(delivery_day));
  return out;
}

std::vector<GridRow> forecast_grid(std::span<const HourlyAggregate> aggregates,
                                   std::span<const int> training_days, double lqr_bandwidth)
{
  std::vector<ForecastSpec> specs;
  for (int p = 1; p <= 5; ++p)
    for (int q = 1; q <= 5; ++q) {
      ForecastSpec s;
      s.p = p;
      s.q = q;
      specs.push_back(s);
    }
  ForecastSpec lqr;
  lqr.model = ForecastSpec::Model::Lqr;
  lqr.bandwidth = lqr_bandwidth;
  specs.push_back(lqr);

  std::vector<GridRow> rows(specs.size());
  const int n = static_cast<int>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    const auto& spec = specs[static_cast<std::size_t>(i)];
    r.model = spec.name();
    r.demand = score(spec, aggregates, training_days, false);
    r.supply = score(spec, aggregates, training_days, true);
  }
  return rows;
}

std::vector<AuctionObservation> window_auctions(const IngestResult& logs, std::span<const int> days)
{
  std::vector<AuctionObservation> out;
  for (const auto& a : logs.auctions)
    if (std::find(days.begin(), days.end(), a.day) != days.end())
      out.push_back(a.auction);
  return out;
}

EmpiricalCurves fit_empirical_curves(std::span<const AuctionObservation> auctions, const CurveSpec& spec,
                                     std::uint64_t seed)
{
  CurveFitOptions opt;
  opt.rlwr = spec.rlwr;
  opt.resample_rate = spec.resample_rate;
  opt.seed = seed;
  return build_auction_curves(auctions, opt);
}

Table curves_table(const EmpiricalCurves& curves)
{
  std::vector<double> xs;
  for (const FittedCurve* c : {&curves.phi, &curves.psi, &curves.pi})
    xs.insert(xs.end(), c->xs().begin(), c->xs().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  Table t;
  t.columns = {"xi", "phi", "psi", "pi"};
  for (double x : xs)
    t.rows.push_back({x, curves.phi(x) * kCpm, curves.psi(x) * kCpm, curves.pi(x) * kCpm});
  return t;
}

EmpiricalCurves curves_from_table(const Table& table)
{
  const auto col = [&](const char* name) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end())
      throw DataError(std::string("curves table lacks column ") + name);
    return static_cast<std::size_t>(it - table.columns.begin());
  };
  const std::size_t cx = col("xi"), cphi = col("phi"), cpsi = col("psi"), cpi = col("pi");
  const auto num = [](const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
      return *d;
    if (const auto* s = std::get_if<std::string>(&c)) {
      try {
        return std::stod(*s);
      } catch (const std::exception&) {
      }
    }
    throw DataError("non-numeric value in curves table");
  };
  std::vector<double> xs, phi, psi, pi;
  for (const auto& r : table.rows) {
    if (r.size() < table.columns.size())
      throw DataError("short row in curves table");
    xs.push_back(num(r[cx]));
    phi.push_back(num(r[cphi]) / kCpm);
    psi.push_back(num(r[cpsi]) / kCpm);
    pi.push_back(num(r[cpi]) / kCpm);
  }
  if (xs.empty())
    throw DataError("curves table is empty");
  EmpiricalCurves c;
  c.phi = FittedCurve(xs, phi);
  c.psi = FittedCurve(xs, psi);
  c.pi = FittedCurve(xs, pi);
  return c;
}

AuctionCurves make_auction_curves(const CurveSpec& spec, const EmpiricalCurves* fitted)
{
  switch (spec.source) {
  case CurveSpec::Source::Uniform: return AuctionCurves::uniform_closed_form(spec.v / kCpm);
  case CurveSpec::Source::LogNormal:
    return AuctionCurves::from_distribution(BidDistribution::log_normal(spec.mu - std::log(kCpm), spec.sigma));
  case CurveSpec::Source::Empirical:
    if (!fitted)
      throw DataError("empirical curves are not available; run fit-curves first");
    return AuctionCurves::from_fitted(*fitted);
  }
  throw ValidationError("unknown curve source");
}

PriceModel make_price_model(const PriceSpec& spec, std::span<const AuctionObservation> observed)
{
  std::vector<double> wins;
  for (const auto& o : observed)
    wins.push_back(o.winning_bid);
  switch (spec.kind) {
  case PriceSpec::Kind::LogNormalFit: return PriceModel::log_normal_fit(wins);
  case PriceSpec::Kind::Empirical:
    if (wins.empty())
      throw DataError("no observed winning bids to bootstrap request prices from");
    return PriceModel::empirical(std::move(wins));
  case PriceSpec::Kind::LogNormal: return PriceModel::log_normal(spec.a - std::log(kCpm), spec.b);
  case PriceSpec::Kind::Uniform: return PriceModel::uniform(spec.a / kCpm, spec.b / kCpm);
  case PriceSpec::Kind::Constant: return PriceModel::constant(spec.a / kCpm);
  }
  throw ValidationError("unknown price model");
}

std::optional<double> prediction_error(double predicted, std::optional<double> realized)
{
  if (!realized || !(*realized > 0.0))
    return std::nullopt;
  return (predicted - *realized) / *realized;
}

RunSummary summary_from_report(const json& report, const std::string& label)
{
  try {
    RunSummary s;
    s.label = label;
    s.r_rtb = report.at("r_rtb").get<double>();
    s.r_pg_rtb = report.at("r_pg_rtb").get<double>();
    if (!report.at("uplift").is_null())
      s.uplift = report.at("uplift").get<double>();
    const auto& batch = report.at("batch");
    s.runs = batch.at("runs").get<int>();
    s.dominance_fraction = batch.at("dominance_fraction").get<double>();
    if (report.contains("realized") && !report.at("realized").is_null())
      s.realized_r_rtb = report.at("realized").at("r_rtb").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw DataError("run output '" + label + "' has an incompatible schema: " + e.what());
  }
}

Table comparison_table(std::span<const RunSummary> runs)
{
  if (runs.empty())
    throw ValidationError("report needs at least one run output");
  Table t;
  t.columns = {"run", "runs", "r_rtb", "r_pg_rtb", "uplift", "dominance_fraction", "r_rtb_realized",
               "prediction_error"};
  int total = 0;
  double dominated = 0.0;
  for (const auto& r : runs) {
    const auto err = prediction_error(r.r_rtb, r.realized_r_rtb);
    t.rows.push_back({r.label, static_cast<std::int64_t>(r.runs), r.r_rtb, r.r_pg_rtb, opt_cell(r.uplift),
                      r.dominance_fraction, opt_cell(r.realized_r_rtb),
                      err ? Cell(*err) : Cell(std::string("unavailable"))});
    total += r.runs;
    dominated += r.dominance_fraction * r.runs;
  }
  t.rows.push_back({std::string("all"), static_cast<std::int64_t>(total), std::monostate{}, std::monostate{},
                    std::monostate{}, dominated / total, std::monostate{}, std::monostate{}});
  return t;
}

Pipeline::Pipeline(RunConfig config, CommandOptions options, std::ostream& log)
  : config_(std::move(config))
  , options_(options)
  , log_(log)
  , out_(config_.out, Provenance{config_.hash(), config_.seed}, options.format)
{
}

Pipeline::~Pipeline() = default;

const IngestResult& Pipeline::logs()
{
  if (!logs_) {
    if (config_.logs.empty())
      throw ValidationError("this command needs auction logs in the config");
    logs_ = std::make_unique<IngestResult>(pgreserve::ingest(config_.logs, config_.slot));
    if (logs_->malformed > 0)
      log_ << "skipped " << logs_->malformed << " malformed of " << logs_->rows << " log rows\n";
  }
  return *logs_;
}

int Pipeline::delivery_day()
{
  if (config_.delivery_day)
    return *config_.delivery_day;
  if (config_.delivery_date)
    return logs().day_of(*config_.delivery_date);
  return logs().last_day() + 1;
}

std::vector<int> Pipeline::training_days()
{
  return training_window(logs(), delivery_day(), config_.training_days);
}

MarketForecast Pipeline::market()
{
  MarketForecast f;
  f.sale_end = config_.sale_end;
  f.delivery_end = config_.delivery_end;
  if (config_.forecast.supply) {
    f.supply = *config_.forecast.supply;
    f.demand = *config_.forecast.demand;
  } else {
    const auto j = read_json(out_.dir() / "forecast.json");
    try {
      f.supply = j.at("supply").get<std::int64_t>();
      f.demand = j.at("demand").get<double>();
    } catch (const json::exception&) {
      throw DataError("forecast.json lacks supply/demand");
    }
  }
  f.validate();
  return f;
}

AuctionCurves Pipeline::auction_curves()
{
  if (config_.curves.source != CurveSpec::Source::Empirical)
    return make_auction_curves(config_.curves, nullptr);
  const auto fitted = curves_from_table(read_csv(out_.dir() / "curves.csv"));
  return make_auction_curves(config_.curves, &fitted);
}

std::vector<std::filesystem::path> Pipeline::ingest()
{
  const auto& res = logs();
  Table agg;
  agg.columns = {"day", "hour", "supply", "demand", "avg_payment"};
  for (const auto& a : res.aggregates)
    agg.rows.push_back({static_cast<std::int64_t>(a.day), static_cast<std::int64_t>(a.hour), a.supply, a.demand,
                        a.avg_payment ? Cell(*a.avg_payment * kCpm) : Cell(std::monostate{})});

  std::vector<AuctionObservation> all;
  for (const auto& a : res.auctions)
    all.push_back(a.auction);
  Table bins;
  bins.columns = {"xi", "count", "mean_payment", "std_payment", "mean_winning_bid"};
  for (const auto& b : bin_by_competition(all))
    bins.rows.push_back({static_cast<std::int64_t>(b.xi), b.count, b.mean_payment * kCpm, b.std_payment * kCpm,
                         b.mean_winning_bid * kCpm});

  log_ << "ingested " << res.auctions.size() << " auctions over " << res.last_day() + 1 << " days from "
       << res.first_date << "\n";
  return {out_.write_table("aggregates", agg), out_.write_table("xi_bins", bins)};
}

std::vector<std::filesystem::path> Pipeline::forecast()
{
  const auto& res = logs();
  const int day = delivery_day();
  const auto days = training_days();
  const auto fc = forecast_market(res.aggregates, day, days, config_.forecast);

  json hourly = json::array();
  for (int h = 0; h < 24; ++h)
    hourly.push_back({{"hour", h}, {"supply", fc.supply_hourly[static_cast<std::size_t>(h)]},
                      {"demand", fc.demand_hourly[static_cast<std::size_t>(h)]}});
  std::vector<std::filesystem::path> written{out_.write_json(
    "forecast.json", {{"model", fc.model}, {"delivery_day", day}, {"training_days", days},
                      {"supply", fc.supply}, {"supply_sum", fc.supply_sum}, {"demand", fc.demand},
                      {"hourly", hourly}})};
  log_ << fc.model << ": S = " << fc.supply << ", Q = " << fc.demand << "\n";

  if (options_.grid) {
    Table t;
    t.columns = {"model", "demand_l2_avg", "demand_l2_std", "supply_l2_avg", "supply_l2_std", "error"};
    for (const auto& r : forecast_grid(res.aggregates, days, config_.forecast.bandwidth)) {
      const std::string err = r.demand.error.empty() ? r.supply.error : r.demand.error;
      t.rows.push_back({r.model, opt_cell(r.demand.avg), opt_cell(r.demand.std), opt_cell(r.supply.avg),
                        opt_cell(r.supply.std), err});
    }
    written.push_back(out_.write_table("forecast_grid", t));
  }
  return written;
}

std::vector<std::filesystem::path> Pipeline::fit_curves()
{
  const auto days = training_days();
  const auto obs = window_auctions(logs(), days);
  const auto curves = fit_empirical_curves(obs, config_.curves, derive_seed(config_.seed, 1));
  log_ << "fitted curves on " << obs.size() << " auctions, " << curves.bins.size() << " competition levels\n";
  return {out_.write_csv("curves.csv", curves_table(curves))};
}

std::vector<std::filesystem::path> Pipeline::price()
{
  const auto f = market();
  const auto curves = auction_curves();
  const auto schedule = reserve_schedule(f, curves, config_.risk);

  Table t;
  t.columns = {"s", "xi", "phi", "psi", "pi", "V", "reserve"};
  int negative = 0;
  for (const auto& e : schedule) {
    t.rows.push_back({e.s, e.xi, e.moments.payment_mean * kCpm, e.moments.payment_std * kCpm,
                      e.moments.winning_mean * kCpm, e.value, e.reserve * kCpm});
    negative += e.reserve < 0.0;
  }
  if (negative > 0)
    log_ << negative << " negative reserve prices in the schedule\n";
  return {out_.write_table("schedule", t)};
}

std::vector<std::filesystem::path> Pipeline::simulate()
{
  SimConfig sc;
  sc.forecast = market();
  sc.curves = auction_curves();
  sc.risk = config_.risk;
  if (config_.simulator.arrival_rate)
    sc.arrival_rate = *config_.simulator.arrival_rate;
  else if (config_.simulator.intensity == SimulatorSpec::Intensity::DemandTimesHorizon)
    sc.arrival_rate = sc.forecast.demand * sc.forecast.sale_end;
  const auto kind = config_.simulator.prices.kind;
  std::vector<AuctionObservation> observed;
  if (kind == PriceSpec::Kind::LogNormalFit || kind == PriceSpec::Kind::Empirical)
    observed = window_auctions(logs(), training_days());
  sc.price_model = make_price_model(config_.simulator.prices, observed);
  sc.seed = derive_seed(config_.seed, 2);
  sc.repetitions = config_.simulator.runs;

  const auto batch = run_batch(sc, config_.simulator.runs);
  const auto& first = batch.runs.front();

  Table trace;
  trace.columns = {"time", "price", "reserve", "accepted", "remaining", "reserve_after"};
  for (const auto& e : first.events)
    trace.rows.push_back({e.time, e.price * kCpm, e.reserve * kCpm, static_cast<std::int64_t>(e.accepted),
                          e.remaining, e.reserve_after * kCpm});

  json runs = json::array();
  for (int i = 0; i < static_cast<int>(batch.runs.size()); ++i) {
    const auto& r = batch.runs[static_cast<std::size_t>(i)].report;
    runs.push_back({{"run", i}, {"r_pg_rtb", r.r_pg_rtb}, {"uplift", opt_json(r.uplift)},
                    {"n_accepted", r.n_accepted}, {"dominates", r.dominates()}});
  }

  json realized = nullptr;
  if (!config_.logs.empty()) {
    const int day = delivery_day();
    if (day >= 0 && day <= logs().last_day()) {
      std::int64_t supply = 0, demand = 0;
      double revenue = 0.0;
      for (const auto& a : logs().auctions)
        if (a.day == day) {
          ++supply;
          demand += a.auction.bidders;
          revenue += a.auction.payment;
        }
      realized = {{"supply", supply}, {"demand", demand}, {"r_rtb", revenue}};
    }
  }

  const auto& rep = first.report;
  const Simulation sim(sc);
  const auto& g = sim.guarantee();
  json report = {
    {"supply", sc.forecast.supply},
    {"demand", sc.forecast.demand},
    {"risk", {{"gamma", sc.risk.gamma}, {"omega", sc.risk.omega}, {"lambda", sc.risk.lambda}}},
    {"arrival_rate", sc.effective_rate()},
    {"price_model", sc.price_model.describe()},
    {"r_rtb", rep.r_rtb},
    {"r_pg_rtb", rep.r_pg_rtb},
    {"uplift", opt_json(rep.uplift)},
    {"n_accepted", rep.n_accepted},
    {"xi_star", opt_json(rep.xi_star)},
    {"dominates", rep.dominates()},
    {"guarantee", {{"holds", g.holds}, {"reason", g.reason}, {"min_difference", g.min_difference},
                   {"at", g.at}, {"cap_binds", g.cap_binds}}},
    {"batch", {{"runs", static_cast<int>(batch.runs.size())}, {"dominance_fraction", batch.dominance_fraction},
               {"uplift_mean", batch.uplift_mean}, {"uplift_std", batch.uplift_std},
               {"accepted_mean", batch.accepted_mean}, {"accepted_std", batch.accepted_std}}},
    {"runs", runs},
    {"realized", realized},
  };
  log_ << "r_rtb = " << rep.r_rtb << ", r_pg_rtb = " << rep.r_pg_rtb << ", accepted " << rep.n_accepted
       << ", dominance " << batch.dominance_fraction * 100.0 << "% of " << batch.runs.size() << " runs\n";
  return {out_.write_table("trace", trace), out_.write_json("report.json", report)};
}

std::vector<std::filesystem::path> Pipeline::report(const std::vector<std::filesystem::path>& run_dirs)
{
  std::vector<std::filesystem::path> dirs = run_dirs;
  if (dirs.empty())
    dirs.push_back(out_.dir());
  std::vector<RunSummary> runs;
  for (const auto& d : dirs) {
    const auto label = d.filename().empty() ? d.parent_path().filename().string() : d.filename().string();
    runs.push_back(summary_from_report(read_json(d / "report.json"), label));
  }
  const auto table = comparison_table(runs);
  return {out_.write_table("comparison", table)};
}

} // namespace pgreserve
