#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pgreserve/error.hpp"
#include "pgreserve/output.hpp"

namespace pgreserve {

using nlohmann::json;

Format parse_format(const std::string& s)
{
  if (s == "csv")
    return Format::Csv;
  if (s == "json")
    return Format::Json;
  throw ValidationError("format must be csv or json, got '" + s + "'");
}

std::string Provenance::header_line() const
{
  return std::string("# pgreserve ") + kVersion + " config=" + config_hash + " seed=" + std::to_string(seed);
}

json Provenance::meta() const
{
  return {{"version", kVersion}, {"config_hash", config_hash}, {"seed", seed}};
}

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const Cell& c)
{
  struct V
  {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const
    {
      if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
      std::string q = "\"";
      for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  };
  return std::visit(V{}, c);
}

json json_cell(const Cell& c)
{
  struct V
  {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(double d) const { return std::isfinite(d) ? json(d) : json(nullptr); }
    json operator()(std::int64_t i) const { return i; }
    json operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

} // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ValidationError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw ValidationError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

OutputDir::OutputDir(std::filesystem::path dir, Provenance prov, Format format)
  : dir_(std::move(dir))
  , prov_(std::move(prov))
  , format_(format)
{
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec)
    throw ValidationError("cannot create output directory " + dir_.string());
}

std::filesystem::path OutputDir::write_table(const std::string& stem, const Table& table) const
{
  if (format_ == Format::Csv)
    return write_csv(stem + ".csv", table);
  json rows = json::array();
  for (const auto& r : table.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < table.columns.size() && i < r.size(); ++i)
      o[table.columns[i]] = json_cell(r[i]);
    rows.push_back(std::move(o));
  }
  return write_json(stem + ".json", {{"columns", table.columns}, {"rows", rows}});
}

std::filesystem::path OutputDir::write_csv(const std::string& name, const Table& table) const
{
  std::ostringstream os;
  os << prov_.header_line() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      os << (i ? "," : "") << csv_cell(r[i]);
    os << '\n';
  }
  const auto path = dir_ / name;
  write_atomic(path, os.str());
  return path;
}

std::filesystem::path OutputDir::write_json(const std::string& name, json body) const
{
  body["meta"] = prov_.meta();
  const auto path = dir_ / name;
  write_atomic(path, body.dump(2) + "\n");
  return path;
}

Table read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("missing input " + path.string());
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
      cells.emplace_back();
    if (!have_header) {
      t.columns = cells;
      have_header = true;
      continue;
    }
    std::vector<Cell> row;
    for (const auto& c : cells)
      row.emplace_back(c);
    t.rows.push_back(std::move(row));
  }
  if (!have_header)
    throw DataError("empty input " + path.string());
  return t;
}

json read_json(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("missing input " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("unreadable " + path.string() + ": " + e.what());
  }
}

} // namespace pgreserve
