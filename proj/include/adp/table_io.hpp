#pragma once

#include <adp/table.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace adp {

enum class TableFormat { Csv, JsonRows };

auto parse_table_format(std::string_view name) -> TableFormat;

/// `movies.csv` -> `movies.schema.json`.
auto sidecar_path(const std::filesystem::path& table_path) -> std::filesystem::path;

/// Reads a table; the table name defaults to the file stem. A sidecar schema next to the file, when
/// present, fixes column order and dtypes; otherwise dtypes are inferred.
auto read_table(const std::filesystem::path& path, TableFormat format = TableFormat::Csv,
                std::optional<std::string> name = std::nullopt) -> Table;
/// Writes the table and, unless disabled, its sidecar schema.
void write_table(const std::filesystem::path& path, const Table& t,
                 TableFormat format = TableFormat::Csv, bool with_sidecar = true);

/// RFC-4180 csv. An unquoted empty field is null; a quoted empty field is the empty string.
auto parse_csv(std::string_view text, std::string name,
               const std::optional<Schema>& schema = std::nullopt) -> Table;
auto to_csv(const Table& t) -> std::string;

auto parse_json_rows(std::string_view text, std::string name,
                     const std::optional<Schema>& schema = std::nullopt) -> Table;
auto to_json_rows(const Table& t) -> std::string;

auto value_to_json(const Value& v) -> nlohmann::ordered_json;
auto value_from_json(const nlohmann::ordered_json& j) -> Value;

auto schema_to_json(const Schema& s) -> nlohmann::ordered_json;
auto schema_from_json(const nlohmann::ordered_json& j) -> Schema;

/// Self-describing encoding used in logs: {name, columns:[{name,dtype}], rows:[[...]]}.
auto table_to_json(const Table& t) -> nlohmann::ordered_json;
auto table_from_json(const nlohmann::ordered_json& j) -> Table;

auto read_text_file(const std::filesystem::path& path) -> std::string;
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace adp
