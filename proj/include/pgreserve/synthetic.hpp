#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace pgreserve {

/// Seeded auction log with a 24-hour cycle in traffic and competition.
struct SyntheticLogSpec
{
  int days = 8;
  std::string start_date = "2024-03-01";
  std::string slot = "slot-1";
  double auctions_per_hour = 40.0;   // mean, before the daily cycle
  double daily_growth = 0.02;        // relative traffic growth per day
  double mean_extra_bidders = 3.0;   // Poisson mean of bidders beyond the first
  double bid_mu = 0.5;               // log-normal bids in CPM
  double bid_sigma = 0.5;
  std::uint64_t seed = 1;
};

/// Writes the log as CSV with the standard header.
void write_synthetic_log(std::ostream& out, const SyntheticLogSpec& spec);

} // namespace pgreserve
