#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgreserve/lowess.hpp"

namespace pgreserve {

/// One row of an auction log. Money columns are CPM as stored in the file.
struct AuctionLogRecord
{
  std::string timestamp;
  std::string slot_id;
  int bid_count = 0;
  std::vector<double> bids;
  double winning_bid = 0.0;
  double payment = 0.0;
  std::optional<double> reserve;
};

/// Per (day, hour) roll-up. avg_payment is per impression.
struct HourlyAggregate
{
  int day = 0;
  int hour = 0;
  std::int64_t supply = 0;
  std::int64_t demand = 0;
  std::optional<double> avg_payment;
};

/// An auction placed on the day/hour grid, money per impression.
struct IngestedAuction
{
  int day = 0;
  int hour = 0;
  AuctionObservation auction;
};

struct IngestResult
{
  std::vector<HourlyAggregate> aggregates;   // full grid, days 0..last, hours 0..23
  std::vector<IngestedAuction> auctions;
  std::string first_date;                    // YYYY-MM-DD of day 0
  std::int64_t rows = 0;                     // rows of the selected slot
  std::int64_t malformed = 0;
  std::map<std::string, std::int64_t> malformed_reasons;

  int last_day() const;
  /// Day index of a YYYY-MM-DD date relative to first_date.
  int day_of(const std::string& date) const;
};

constexpr double kCpm = 1000.0;

/// Parses one log row against the header columns. Throws DataError with the reason.
AuctionLogRecord parse_log_row(const std::vector<std::string>& header, const std::string& line);

/// Collects rows from one or more CSV logs and rolls them up.
class LogIngestor
{
public:
  explicit LogIngestor(std::optional<std::string> slot = std::nullopt);

  void add(std::istream& in, const std::string& source);
  void add_file(const std::filesystem::path& path);

  /// Fails when more than 1% of the selected rows are malformed or nothing was selected.
  IngestResult finish() const;

private:
  struct Row
  {
    std::int64_t epoch_day;
    int hour;
    AuctionObservation auction;
  };

  std::optional<std::string> slot_;
  std::vector<Row> rows_;
  std::int64_t malformed_ = 0;
  std::map<std::string, std::int64_t> reasons_;
};

IngestResult ingest(std::span<const std::filesystem::path> logs,
                    const std::optional<std::string>& slot = std::nullopt);

} // namespace pgreserve
