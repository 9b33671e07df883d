#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pgreserve {

inline constexpr const char* kVersion = "0.1.0";

enum class Format
{
  Csv,
  Json,
};

Format parse_format(const std::string& s);

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Stamp carried by every output file.
struct Provenance
{
  std::string config_hash;
  std::uint64_t seed = 0;

  /// "# pgreserve <version> config=<hash> seed=<seed>"
  std::string header_line() const;
  nlohmann::json meta() const;
};

/// Writes files into one directory, each atomically (temp file + rename).
class OutputDir
{
public:
  OutputDir(std::filesystem::path dir, Provenance prov, Format format = Format::Csv);

  const std::filesystem::path& dir() const { return dir_; }
  Format format() const { return format_; }

  /// Writes stem.csv or stem.json according to the format; returns the path.
  std::filesystem::path write_table(const std::string& stem, const Table& table) const;
  std::filesystem::path write_csv(const std::string& name, const Table& table) const;
  /// Adds a "meta" object with the version, config hash and seed.
  std::filesystem::path write_json(const std::string& name, nlohmann::json body) const;

private:
  std::filesystem::path dir_;
  Provenance prov_;
  Format format_;
};

void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_number(double v);

/// Reads a CSV written by OutputDir: skips the header comment, returns column names and rows.
Table read_csv(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace pgreserve
