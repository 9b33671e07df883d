#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pgreserve/error.hpp"
#include "pgreserve/synthetic.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Write a seeded synthetic auction log"};
  pgreserve::SyntheticLogSpec spec;
  std::string out;
  app.add_option("--out", out, "CSV file to write")->required();
  app.add_option("--days", spec.days, "number of days");
  app.add_option("--start", spec.start_date, "first date, YYYY-MM-DD");
  app.add_option("--slot", spec.slot, "slot id");
  app.add_option("--rate", spec.auctions_per_hour, "mean auctions per hour");
  app.add_option("--seed", spec.seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return 2;
    }
    pgreserve::write_synthetic_log(f, spec);
  } catch (const pgreserve::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  return 0;
}
