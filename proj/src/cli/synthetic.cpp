#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "pgreserve/error.hpp"
#include "pgreserve/rng.hpp"
#include "pgreserve/synthetic.hpp"

namespace pgreserve {

namespace {

int poisson(Rng& rng, double mean)
{
  // Counts arrivals of a unit-rate process up to `mean`.
  int k = 0;
  double t = rng.exponential(1.0);
  while (t <= mean) {
    ++k;
    t += rng.exponential(1.0);
  }
  return k;
}

std::string cpm(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

} // namespace

void write_synthetic_log(std::ostream& out, const SyntheticLogSpec& spec)
{
  int y = 0, m = 0, d = 0;
  if (std::sscanf(spec.start_date.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3)
    throw ValidationError("start date must be YYYY-MM-DD");
  const std::chrono::sys_days start{std::chrono::year{y} / std::chrono::month(static_cast<unsigned>(m)) /
                                    std::chrono::day(static_cast<unsigned>(d))};
  Rng rng(spec.seed);

  out << "timestamp,slot_id,bid_count,bids,winning_bid,payment,reserve\n";
  std::vector<double> bids;
  for (int day = 0; day < spec.days; ++day) {
    const std::chrono::year_month_day ymd{start + std::chrono::days{day}};
    for (int hour = 0; hour < 24; ++hour) {
      const double cycle = std::sin(2.0 * std::numbers::pi * (hour - 9) / 24.0);
      const double traffic = spec.auctions_per_hour * (1.0 + 0.6 * cycle) * (1.0 + spec.daily_growth * day);
      const double competition = spec.mean_extra_bidders * (1.0 + 0.4 * cycle);
      const int n = poisson(rng, traffic);

      std::vector<int> seconds(static_cast<std::size_t>(n));
      for (auto& s : seconds)
        s = static_cast<int>(rng.below(3600));
      std::sort(seconds.begin(), seconds.end());

      for (int i = 0; i < n; ++i) {
        const int bidders = 1 + poisson(rng, competition);
        bids.clear();
        for (int b = 0; b < bidders; ++b)
          bids.push_back(std::round(std::exp(spec.bid_mu + spec.bid_sigma * rng.normal()) * 1e4) / 1e4);
        std::sort(bids.begin(), bids.end(), std::greater<>());

        char stamp[32];
        const int sec = seconds[static_cast<std::size_t>(i)];
        std::snprintf(stamp, sizeof stamp, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour, sec / 60,
                      sec % 60);
        out << stamp << ',' << spec.slot << ',' << bidders << ',';
        for (std::size_t b = 0; b < bids.size(); ++b)
          out << (b ? ";" : "") << cpm(bids[b]);
        out << ',' << cpm(bids[0]) << ',' << cpm(bidders > 1 ? bids[1] : 0.0) << ",\n";
      }
    }
  }
}

} // namespace pgreserve
