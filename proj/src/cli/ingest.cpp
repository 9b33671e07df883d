#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pgreserve/error.hpp"
#include "pgreserve/ingest.hpp"

namespace pgreserve {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == sep && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string s)
{
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

double money(const std::string& field, const char* what)
{
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw DataError(std::string("unparseable ") + what);
  if (!std::isfinite(v) || v < 0.0)
    throw DataError(std::string("negative or non-finite ") + what);
  return v;
}

std::chrono::sys_days civil_day(int y, unsigned m, unsigned d)
{
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok())
    throw DataError("invalid calendar date");
  return std::chrono::sys_days{ymd};
}

struct Stamp
{
  std::int64_t epoch_day;
  int hour;
};

Stamp parse_timestamp(const std::string& ts)
{
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int used = 0;
  if (std::sscanf(ts.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &s, &used) != 7 ||
      (sep != 'T' && sep != ' '))
    throw DataError("bad timestamp");
  const std::string rest = ts.substr(static_cast<std::size_t>(used));
  if (!(rest.empty() || rest == "Z"))
    throw DataError("bad timestamp");
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60 || mo < 1 || d < 1)
    throw DataError("bad timestamp");
  const auto day = civil_day(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return {day.time_since_epoch().count(), h};
}

std::string format_date(std::int64_t epoch_day)
{
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{epoch_day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int column(const std::vector<std::string>& header, const char* name, bool required)
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    if (required)
      throw DataError(std::string("log header lacks column '") + name + "'");
    return -1;
  }
  return static_cast<int>(it - header.begin());
}

const std::string& field(const std::vector<std::string>& cells, int idx)
{
  static const std::string empty;
  return idx >= 0 && static_cast<std::size_t>(idx) < cells.size() ? cells[static_cast<std::size_t>(idx)] : empty;
}

} // namespace

int IngestResult::last_day() const
{
  return aggregates.empty() ? -1 : aggregates.back().day;
}

int IngestResult::day_of(const std::string& date) const
{
  int y = 0, m = 0, d = 0;
  if (std::sscanf(date.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || d < 1)
    throw ValidationError("dates must be YYYY-MM-DD, got '" + date + "'");
  int y0 = 0, m0 = 0, d0 = 0;
  std::sscanf(first_date.c_str(), "%4d-%2d-%2d", &y0, &m0, &d0);
  const auto diff = civil_day(y, static_cast<unsigned>(m), static_cast<unsigned>(d)) -
                    civil_day(y0, static_cast<unsigned>(m0), static_cast<unsigned>(d0));
  return static_cast<int>(diff.count());
}

AuctionLogRecord parse_log_row(const std::vector<std::string>& header, const std::string& line)
{
  const auto cells = split(line, ',');
  if (cells.size() < header.size())
    throw DataError("too few columns");

  AuctionLogRecord r;
  r.timestamp = trim(field(cells, column(header, "timestamp", true)));
  r.slot_id = trim(field(cells, column(header, "slot_id", true)));

  const std::string bids = trim(field(cells, column(header, "bids", false)));
  if (!bids.empty())
    for (const auto& b : split(bids, ';'))
      r.bids.push_back(money(b, "bid"));

  const std::string count = trim(field(cells, column(header, "bid_count", false)));
  if (!count.empty()) {
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), r.bid_count);
    if (ec != std::errc{} || ptr != count.data() + count.size())
      throw DataError("unparseable bid_count");
    if (!r.bids.empty() && static_cast<std::size_t>(r.bid_count) != r.bids.size())
      throw DataError("bid_count disagrees with bids");
  } else {
    r.bid_count = static_cast<int>(r.bids.size());
  }
  if (r.bid_count < 1)
    throw DataError("bid_count below 1");

  r.winning_bid = money(field(cells, column(header, "winning_bid", true)), "winning_bid");
  r.payment = money(field(cells, column(header, "payment", true)), "payment");
  if (r.payment > r.winning_bid)
    throw DataError("payment above winning bid");

  const std::string reserve = trim(field(cells, column(header, "reserve", false)));
  if (!reserve.empty())
    r.reserve = money(reserve, "reserve");
  return r;
}

LogIngestor::LogIngestor(std::optional<std::string> slot)
  : slot_(std::move(slot))
{
}

void LogIngestor::add(std::istream& in, const std::string& source)
{
  std::string line;
  if (!std::getline(in, line))
    throw DataError(source + ": empty log");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  std::vector<std::string> header;
  for (auto& h : split(line, ','))
    header.push_back(trim(h));
  for (const char* required : {"timestamp", "slot_id", "winning_bid", "payment"})
    column(header, required, true);
  if (column(header, "bid_count", false) < 0 && column(header, "bids", false) < 0)
    throw DataError(source + ": log needs a bid_count or bids column");
  const int slot_col = column(header, "slot_id", true);

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (trim(line).empty())
      continue;
    if (slot_ && trim(field(split(line, ','), slot_col)) != *slot_)
      continue;
    try {
      const auto rec = parse_log_row(header, line);
      const auto stamp = parse_timestamp(rec.timestamp);
      rows_.push_back({stamp.epoch_day, stamp.hour,
                       AuctionObservation{rec.bid_count, rec.payment / kCpm, rec.winning_bid / kCpm}});
    } catch (const DataError& e) {
      ++malformed_;
      ++reasons_[e.what()];
    }
  }
}

void LogIngestor::add_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open log " + path.string());
  add(in, path.string());
}

IngestResult LogIngestor::finish() const
{
  IngestResult res;
  res.rows = static_cast<std::int64_t>(rows_.size()) + malformed_;
  res.malformed = malformed_;
  res.malformed_reasons = reasons_;
  if (rows_.empty())
    throw DataError(slot_ ? "no usable log rows for slot " + *slot_ : "no usable log rows");
  if (static_cast<double>(malformed_) > 0.01 * static_cast<double>(res.rows))
    throw DataError(std::to_string(malformed_) + " of " + std::to_string(res.rows) +
                    " log rows are malformed (limit 1%)");

  std::int64_t first = rows_.front().epoch_day, last = first;
  for (const auto& r : rows_) {
    first = std::min(first, r.epoch_day);
    last = std::max(last, r.epoch_day);
  }
  res.first_date = format_date(first);
  const auto days = static_cast<std::size_t>(last - first + 1);

  std::vector<double> pay(days * 24, 0.0);
  res.aggregates.resize(days * 24);
  for (std::size_t i = 0; i < res.aggregates.size(); ++i) {
    res.aggregates[i].day = static_cast<int>(i / 24);
    res.aggregates[i].hour = static_cast<int>(i % 24);
  }
  res.auctions.reserve(rows_.size());
  for (const auto& r : rows_) {
    const int day = static_cast<int>(r.epoch_day - first);
    const auto i = static_cast<std::size_t>(day) * 24 + static_cast<std::size_t>(r.hour);
    auto& a = res.aggregates[i];
    ++a.supply;
    a.demand += r.auction.bidders;
    pay[i] += r.auction.payment;
    res.auctions.push_back({day, r.hour, r.auction});
  }
  for (std::size_t i = 0; i < res.aggregates.size(); ++i)
    if (res.aggregates[i].supply > 0)
      res.aggregates[i].avg_payment = pay[i] / static_cast<double>(res.aggregates[i].supply);
  return res;
}

IngestResult ingest(std::span<const std::filesystem::path> logs, const std::optional<std::string>& slot)
{
  if (logs.empty())
    throw ValidationError("no log files given");
  LogIngestor ing(slot);
  for (const auto& p : logs)
    ing.add_file(p);
  return ing.finish();
}

} // namespace pgreserve
