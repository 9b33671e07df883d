#include <iostream>

#include "CLI11.hpp"
#include "pgreserve/error.hpp"
#include "pgreserve/pipeline.hpp"

namespace {

struct Flags
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> slot;
  bool grid = false;
  std::string format = "csv";
  std::vector<std::string> runs;
};

void common(CLI::App* sub, Flags& f)
{
  sub->add_option("--config", f.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "override the configured seed");
  sub->add_option("--out", f.out, "override the output directory");
  sub->add_option("--slot", f.slot, "only use log rows of this slot");
  sub->add_option("--format", f.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Risk-aware reserve pricing for programmatic guaranteed sales"};
  app.require_subcommand(1);
  Flags f;

  auto* ingest = app.add_subcommand("ingest", "roll auction logs up into hourly aggregates");
  auto* forecast = app.add_subcommand("forecast", "forecast supply and demand for the delivery day");
  auto* fit = app.add_subcommand("fit-curves", "fit the empirical payment curves");
  auto* price = app.add_subcommand("price", "compute the reserve price schedule");
  auto* simulate = app.add_subcommand("simulate", "simulate guaranteed buy requests");
  auto* report = app.add_subcommand("report", "compare simulation runs");
  for (auto* sub : {ingest, forecast, fit, price, simulate, report})
    common(sub, f);
  forecast->add_flag("--grid", f.grid, "also score the full model grid");
  report->add_option("runs", f.runs, "run output directories (default: the output directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = pgreserve::load_config(f.config);
    if (f.seed)
      cfg.seed = *f.seed;
    if (f.out)
      cfg.out = *f.out;
    if (f.slot)
      cfg.slot = *f.slot;

    pgreserve::CommandOptions opt;
    opt.format = pgreserve::parse_format(f.format);
    opt.grid = f.grid;
    pgreserve::Pipeline pipeline(std::move(cfg), opt, std::cerr);

    std::vector<std::filesystem::path> written;
    if (ingest->parsed())
      written = pipeline.ingest();
    else if (forecast->parsed())
      written = pipeline.forecast();
    else if (fit->parsed())
      written = pipeline.fit_curves();
    else if (price->parsed())
      written = pipeline.price();
    else if (simulate->parsed())
      written = pipeline.simulate();
    else {
      std::vector<std::filesystem::path> dirs(f.runs.begin(), f.runs.end());
      written = pipeline.report(dirs);
    }
    for (const auto& p : written)
      std::cout << p.string() << "\n";
    return 0;
  } catch (const pgreserve::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
