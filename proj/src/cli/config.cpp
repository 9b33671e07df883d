#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pgreserve/config.hpp"
#include "pgreserve/error.hpp"

namespace pgreserve {

using nlohmann::json;

namespace {

template <typename T>
T get(const json& j, const char* key, T fallback)
{
  if (!j.contains(key) || j.at(key).is_null())
    return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

const json& section(const json& j, const char* key)
{
  static const json empty = json::object();
  if (!j.contains(key))
    return empty;
  if (!j.at(key).is_object())
    throw ValidationError(std::string("config section '") + key + "' must be an object");
  return j.at(key);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      ok = ok || k == a;
    if (!ok)
      throw ValidationError("unknown config key '" + where + k + "'");
  }
}

} // namespace

std::string ForecastSpec::name() const
{
  if (model == Model::Lqr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "LQR(%g)", bandwidth);
    return buf;
  }
  return "PNR(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ValidationError("config must be a JSON object");
  check_keys(j, {"logs", "slot", "delivery_day", "delivery_date", "training_days", "forecast", "curves",
                 "risk", "horizon", "simulator", "seed", "out"}, "");

  RunConfig c;
  if (j.contains("logs")) {
    const auto& logs = j.at("logs");
    if (logs.is_string())
      c.logs.push_back(base_dir / logs.get<std::string>());
    else if (logs.is_array())
      for (const auto& l : logs) {
        if (!l.is_string())
          throw ValidationError("config 'logs' entries must be paths");
        c.logs.push_back(base_dir / l.get<std::string>());
      }
    else
      throw ValidationError("config 'logs' must be a path or a list of paths");
  }
  if (j.contains("slot") && !j.at("slot").is_null())
    c.slot = get<std::string>(j, "slot", "");
  if (j.contains("delivery_day") && !j.at("delivery_day").is_null())
    c.delivery_day = get<int>(j, "delivery_day", 0);
  if (j.contains("delivery_date") && !j.at("delivery_date").is_null())
    c.delivery_date = get<std::string>(j, "delivery_date", "");
  c.training_days = get<int>(j, "training_days", c.training_days);
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  c.out = base_dir / get<std::string>(j, "out", "out");

  const auto& f = section(j, "forecast");
  check_keys(f, {"model", "p", "q", "bandwidth", "supply", "demand"}, "forecast.");
  const auto model = get<std::string>(f, "model", "pnr");
  if (model == "pnr")
    c.forecast.model = ForecastSpec::Model::Pnr;
  else if (model == "lqr")
    c.forecast.model = ForecastSpec::Model::Lqr;
  else
    throw ValidationError("forecast.model must be 'pnr' or 'lqr'");
  c.forecast.p = get<int>(f, "p", c.forecast.p);
  c.forecast.q = get<int>(f, "q", c.forecast.q);
  c.forecast.bandwidth = get<double>(f, "bandwidth", c.forecast.bandwidth);
  if (f.contains("supply") && !f.at("supply").is_null())
    c.forecast.supply = get<std::int64_t>(f, "supply", 0);
  if (f.contains("demand") && !f.at("demand").is_null())
    c.forecast.demand = get<double>(f, "demand", 0.0);

  const auto& cv = section(j, "curves");
  check_keys(cv, {"source", "v", "mu", "sigma", "fraction", "robustness_iters", "degree", "resample_rate"},
             "curves.");
  const auto source = get<std::string>(cv, "source", "empirical");
  if (source == "empirical")
    c.curves.source = CurveSpec::Source::Empirical;
  else if (source == "uniform")
    c.curves.source = CurveSpec::Source::Uniform;
  else if (source == "lognormal")
    c.curves.source = CurveSpec::Source::LogNormal;
  else
    throw ValidationError("curves.source must be 'empirical', 'uniform' or 'lognormal'");
  c.curves.v = get<double>(cv, "v", c.curves.v);
  c.curves.mu = get<double>(cv, "mu", c.curves.mu);
  c.curves.sigma = get<double>(cv, "sigma", c.curves.sigma);
  c.curves.rlwr.fraction = get<double>(cv, "fraction", c.curves.rlwr.fraction);
  c.curves.rlwr.robustness_iters = get<int>(cv, "robustness_iters", c.curves.rlwr.robustness_iters);
  c.curves.rlwr.degree = get<int>(cv, "degree", c.curves.rlwr.degree);
  c.curves.resample_rate = get<double>(cv, "resample_rate", c.curves.resample_rate);

  const auto& r = section(j, "risk");
  check_keys(r, {"gamma", "omega", "lambda"}, "risk.");
  c.risk.gamma = get<double>(r, "gamma", 0.0);
  c.risk.omega = get<double>(r, "omega", 0.0);
  c.risk.lambda = get<double>(r, "lambda", 0.0);

  const auto& h = section(j, "horizon");
  check_keys(h, {"sale_end", "delivery_end"}, "horizon.");
  c.sale_end = get<double>(h, "sale_end", c.sale_end);
  c.delivery_end = get<double>(h, "delivery_end", c.delivery_end);

  const auto& s = section(j, "simulator");
  check_keys(s, {"arrival_rate", "intensity", "price_model", "runs"}, "simulator.");
  if (s.contains("arrival_rate") && !s.at("arrival_rate").is_null())
    c.simulator.arrival_rate = get<double>(s, "arrival_rate", 0.0);
  const auto intensity = get<std::string>(s, "intensity", "demand_over_horizon");
  if (intensity == "demand_over_horizon")
    c.simulator.intensity = SimulatorSpec::Intensity::DemandOverHorizon;
  else if (intensity == "demand_times_horizon")
    c.simulator.intensity = SimulatorSpec::Intensity::DemandTimesHorizon;
  else
    throw ValidationError("simulator.intensity must be 'demand_over_horizon' or 'demand_times_horizon'");
  c.simulator.runs = get<int>(s, "runs", c.simulator.runs);

  const auto& pm = section(s, "price_model");
  check_keys(pm, {"kind", "price", "lo", "hi", "mu", "sigma"}, "simulator.price_model.");
  const auto kind = get<std::string>(pm, "kind", "lognormal_fit");
  auto& ps = c.simulator.prices;
  if (kind == "lognormal_fit") {
    ps.kind = PriceSpec::Kind::LogNormalFit;
  } else if (kind == "empirical") {
    ps.kind = PriceSpec::Kind::Empirical;
  } else if (kind == "constant") {
    ps.kind = PriceSpec::Kind::Constant;
    ps.a = get<double>(pm, "price", 0.0);
  } else if (kind == "uniform") {
    ps.kind = PriceSpec::Kind::Uniform;
    ps.a = get<double>(pm, "lo", 0.0);
    ps.b = get<double>(pm, "hi", 0.0);
  } else if (kind == "lognormal") {
    ps.kind = PriceSpec::Kind::LogNormal;
    ps.a = get<double>(pm, "mu", 0.0);
    ps.b = get<double>(pm, "sigma", 0.0);
  } else {
    throw ValidationError("unknown simulator.price_model.kind '" + kind + "'");
  }

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void RunConfig::validate() const
{
  for (const auto& l : logs)
    if (!std::filesystem::exists(l))
      throw ValidationError("log file not found: " + l.string());
  if (training_days < 2)
    throw ValidationError("training_days must be at least 2");
  if (forecast.model == ForecastSpec::Model::Pnr &&
      (forecast.p < 1 || forecast.p > 5 || forecast.q < 1 || forecast.q > 5))
    throw ValidationError("PNR degrees must lie in [1, 5]");
  if (!(forecast.bandwidth > 0.0 && forecast.bandwidth <= 1.0))
    throw ValidationError("LQR bandwidth must lie in (0, 1]");
  if (forecast.supply && *forecast.supply <= 0)
    throw ValidationError("forecast.supply must be positive");
  if (forecast.demand && !(std::isfinite(*forecast.demand) && *forecast.demand >= 0.0))
    throw ValidationError("forecast.demand must be non-negative");
  if (forecast.supply.has_value() != forecast.demand.has_value())
    throw ValidationError("forecast.supply and forecast.demand must be given together");
  if (!(curves.v > 0.0) || !(curves.sigma > 0.0))
    throw ValidationError("curve parameters v and sigma must be positive");
  if (!(curves.resample_rate > 0.0))
    throw ValidationError("curves.resample_rate must be positive");
  if (!(curves.rlwr.fraction > 0.0 && curves.rlwr.fraction <= 1.0))
    throw ValidationError("curves.fraction must lie in (0, 1]");
  if (curves.rlwr.robustness_iters < 0 || curves.rlwr.degree < 0 || curves.rlwr.degree > 1)
    throw ValidationError("curves.robustness_iters must be >= 0 and curves.degree 0 or 1");
  risk.validate();
  if (!(sale_end > 0.0 && delivery_end > sale_end))
    throw ValidationError("horizon must satisfy 0 < sale_end < delivery_end");
  if (simulator.runs < 1)
    throw ValidationError("simulator.runs must be >= 1");
  if (simulator.arrival_rate && !(*simulator.arrival_rate >= 0.0))
    throw ValidationError("simulator.arrival_rate must be non-negative");
  const auto& p = simulator.prices;
  if (!(p.a >= 0.0 || p.kind == PriceSpec::Kind::LogNormal) || !(p.b >= 0.0))
    throw ValidationError("price model parameters must be non-negative");
  if (p.kind == PriceSpec::Kind::Uniform && p.b < p.a)
    throw ValidationError("price_model uniform needs lo <= hi");
  if (delivery_day && delivery_date)
    throw ValidationError("give delivery_day or delivery_date, not both");
  if (logs.empty() && (curves.source == CurveSpec::Source::Empirical || !forecast.supply))
    throw ValidationError("config needs logs unless forecast and curves are both given analytically");
}

std::string RunConfig::canonical() const
{
  json j;
  std::vector<std::string> paths;
  for (const auto& l : logs)
    paths.push_back(l.filename().string());
  j["logs"] = paths;
  j["slot"] = slot ? json(*slot) : json(nullptr);
  j["delivery_day"] = delivery_day ? json(*delivery_day) : json(nullptr);
  j["delivery_date"] = delivery_date ? json(*delivery_date) : json(nullptr);
  j["training_days"] = training_days;
  j["forecast"] = {{"model", forecast.name()},
                   {"supply", forecast.supply ? json(*forecast.supply) : json(nullptr)},
                   {"demand", forecast.demand ? json(*forecast.demand) : json(nullptr)}};
  j["curves"] = {{"source", static_cast<int>(curves.source)}, {"v", curves.v}, {"mu", curves.mu},
                 {"sigma", curves.sigma}, {"fraction", curves.rlwr.fraction},
                 {"robustness_iters", curves.rlwr.robustness_iters}, {"degree", curves.rlwr.degree},
                 {"resample_rate", curves.resample_rate}};
  j["risk"] = {{"gamma", risk.gamma}, {"omega", risk.omega}, {"lambda", risk.lambda}};
  j["horizon"] = {{"sale_end", sale_end}, {"delivery_end", delivery_end}};
  j["simulator"] = {{"arrival_rate", simulator.arrival_rate ? json(*simulator.arrival_rate) : json(nullptr)},
                    {"intensity", static_cast<int>(simulator.intensity)},
                    {"price_kind", static_cast<int>(simulator.prices.kind)},
                    {"a", simulator.prices.a}, {"b", simulator.prices.b},
                    {"runs", simulator.runs}};
  j["seed"] = seed;
  return j.dump();
}

std::string RunConfig::hash() const
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace pgreserve
