#include <adp/table_io.hpp>

#include <adp/error.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace adp {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CsvField {
    std::string text;
    bool quoted = false;
};

auto split_csv_records(std::string_view text) -> std::vector<std::vector<CsvField>> {
    std::vector<std::vector<CsvField>> records;
    std::vector<CsvField> record;
    CsvField field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field = {};
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.text += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.text += ch;
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (field_started) {
                throw IoError("csv line " + std::to_string(line) + ": stray quote inside field");
            }
            in_quotes = true;
            field.quoted = true;
            field_started = true;
            break;
        case ',': end_field(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            ++line;
            break;
        case '\n':
            end_record();
            ++line;
            break;
        default:
            if (field.quoted) {
                throw IoError("csv line " + std::to_string(line) + ": text after closing quote");
            }
            field.text += ch;
            field_started = true;
        }
    }
    if (in_quotes) {
        throw IoError("csv: unterminated quoted field");
    }
    if (field_started || !record.empty()) {
        end_record();
    }
    return records;
}

auto needs_quotes(const std::string& s) -> bool {
    return s.empty() || s.find_first_of(",\"\r\n") != std::string::npos || s.front() == ' ' ||
           s.back() == ' ';
}

auto quote_csv(const std::string& s) -> std::string {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

auto csv_cell(const Value& v) -> std::string {
    switch (v.kind()) {
    case Kind::Null: return {};
    case Kind::Text: return needs_quotes(v.as_text()) ? quote_csv(v.as_text()) : v.as_text();
    case Kind::List: return quote_csv(value_to_json(v).dump());
    default: return render(v);
    }
}

auto infer_kind(const std::vector<const CsvField*>& cells) -> Kind {
    bool any = false;
    bool all_int = true;
    bool all_real = true;
    bool all_bool = true;
    for (const auto* f : cells) {
        if (!f->quoted && f->text.empty()) continue;
        any = true;
        if (all_int && !parse_int_strict(f->text)) all_int = false;
        if (all_real && !parse_real_strict(f->text)) all_real = false;
        if (all_bool && !parse_bool_strict(f->text)) all_bool = false;
    }
    if (!any) return Kind::Null;
    if (all_int) return Kind::Integer;
    if (all_real) return Kind::Real;
    if (all_bool) return Kind::Boolean;
    return Kind::Text;
}

auto convert_cell(const CsvField& f, Kind dtype, const std::string& column, std::size_t line) -> Value {
    if (!f.quoted && f.text.empty()) {
        return {};
    }
    auto fail = [&] {
        return IoError("csv line " + std::to_string(line) + ": cannot read '" + f.text +
                       "' as " + std::string(kind_name(dtype)) + " for column '" + column + "'");
    };
    switch (dtype) {
    case Kind::Null: throw fail();
    case Kind::Integer:
        if (auto v = parse_int_strict(f.text)) return Value(*v);
        throw fail();
    case Kind::Real:
        if (auto v = parse_real_strict(f.text)) return Value(*v);
        throw fail();
    case Kind::Boolean:
        if (auto v = parse_bool_strict(f.text)) return Value(*v);
        throw fail();
    case Kind::Text: return Value(f.text);
    case Kind::List: {
        try {
            auto v = value_from_json(json::parse(f.text));
            if (v.kind() != Kind::List) throw fail();
            return v;
        } catch (const json::exception&) {
            throw fail();
        }
    }
    }
    throw fail();
}

auto json_type_kind(const json& j) -> Kind {
    if (j.is_null()) return Kind::Null;
    if (j.is_boolean()) return Kind::Boolean;
    if (j.is_number_integer()) return Kind::Integer;
    if (j.is_number()) return Kind::Real;
    if (j.is_string()) return Kind::Text;
    if (j.is_array()) return Kind::List;
    throw IoError("unsupported json value: " + j.dump());
}

} // namespace

auto parse_table_format(std::string_view name) -> TableFormat {
    if (name == "csv") return TableFormat::Csv;
    if (name == "json" || name == "json-rows") return TableFormat::JsonRows;
    throw IoError("unknown table format '" + std::string(name) + "'");
}

auto sidecar_path(const fs::path& table_path) -> fs::path {
    auto p = table_path;
    p.replace_extension(".schema.json");
    return p;
}

auto value_to_json(const Value& v) -> json {
    switch (v.kind()) {
    case Kind::Null: return nullptr;
    case Kind::Boolean: return v.as_bool();
    case Kind::Integer: return v.as_int();
    case Kind::Real: return v.as_real();
    case Kind::Text: return v.as_text();
    case Kind::List: {
        json arr = json::array();
        for (const auto& item : v.as_list()) arr.push_back(value_to_json(item));
        return arr;
    }
    }
    return nullptr;
}

auto value_from_json(const json& j) -> Value {
    switch (json_type_kind(j)) {
    case Kind::Null: return {};
    case Kind::Boolean: return Value(j.get<bool>());
    case Kind::Integer:
        if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            throw IoError("integer out of range: " + j.dump());
        }
        return Value(j.get<std::int64_t>());
    case Kind::Real: return Value(j.get<double>());
    case Kind::Text: return Value(j.get<std::string>());
    case Kind::List: {
        Value::List items;
        for (const auto& e : j) items.push_back(value_from_json(e));
        return Value(std::move(items));
    }
    }
    return {};
}

auto schema_to_json(const Schema& s) -> json {
    json out;
    out["table_name"] = s.table_name;
    out["description"] = s.description ? json(*s.description) : json(nullptr);
    json cols = json::array();
    for (const auto& c : s.columns) {
        json col;
        col["name"] = c.name;
        col["dtype"] = std::string(kind_name(c.dtype));
        col["description"] = c.description ? json(*c.description) : json(nullptr);
        cols.push_back(std::move(col));
    }
    out["columns"] = std::move(cols);
    return out;
}

auto schema_from_json(const json& j) -> Schema {
    try {
        Schema s;
        s.table_name = j.value("table_name", std::string{});
        if (j.contains("description") && j["description"].is_string()) {
            s.description = j["description"].get<std::string>();
        }
        std::set<std::string> seen;
        for (const auto& c : j.at("columns")) {
            ColumnSpec col;
            col.name = c.at("name").get<std::string>();
            auto dtype = parse_kind(c.value("dtype", std::string("null")));
            if (!dtype) {
                throw IoError("schema: unknown dtype for column '" + col.name + "'");
            }
            col.dtype = *dtype;
            if (c.contains("description") && c["description"].is_string()) {
                col.description = c["description"].get<std::string>();
            }
            if (col.name.empty() || !seen.insert(col.name).second) {
                throw IoError("schema: empty or duplicate column name '" + col.name + "'");
            }
            s.columns.push_back(std::move(col));
        }
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("schema: ") + e.what());
    }
}

auto parse_csv(std::string_view text, std::string name, const std::optional<Schema>& schema) -> Table {
    auto records = split_csv_records(text);
    if (records.empty()) {
        throw IoError("csv '" + name + "': missing header line");
    }
    std::vector<std::string> header;
    std::set<std::string> seen;
    for (auto& f : records.front()) {
        if (!seen.insert(f.text).second) {
            throw IoError("csv '" + name + "': duplicate header '" + f.text + "'");
        }
        header.push_back(f.text);
    }
    if (header.size() == 1 && header.front().empty() && !records.front().front().quoted) {
        header.clear();
    }
    const auto width = header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw IoError("csv '" + name + "': ragged row at line " + std::to_string(r + 1) + " (" +
                          std::to_string(records[r].size()) + " fields, expected " +
                          std::to_string(width) + ")");
        }
    }

    Schema out_schema{name, std::nullopt, {}};
    if (schema) {
        out_schema.description = schema->description;
        if (schema->columns.size() != width) {
            throw IoError("csv '" + name + "': header does not match sidecar schema");
        }
    }
    for (std::size_t c = 0; c < width; ++c) {
        ColumnSpec spec{header[c], Kind::Null, std::nullopt};
        if (schema) {
            auto idx = schema->column_index(header[c]);
            if (!idx) {
                throw IoError("csv '" + name + "': column '" + header[c] + "' missing from sidecar schema");
            }
            spec = schema->columns[*idx];
        } else {
            std::vector<const CsvField*> cells;
            for (std::size_t r = 1; r < records.size(); ++r) cells.push_back(&records[r][c]);
            spec.dtype = infer_kind(cells);
        }
        out_schema.columns.push_back(std::move(spec));
    }

    std::vector<Row> rows;
    rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        Row row;
        row.reserve(width);
        for (std::size_t c = 0; c < width; ++c) {
            row.push_back(convert_cell(records[r][c], out_schema.columns[c].dtype, header[c], r + 1));
        }
        rows.push_back(std::move(row));
    }
    return Table(std::move(out_schema), std::move(rows));
}

auto to_csv(const Table& t) -> std::string {
    std::string out;
    const auto names = t.column_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c > 0) out += ',';
        out += needs_quotes(names[c]) ? quote_csv(names[c]) : names[c];
    }
    out += '\n';
    for (const auto& row : t.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += csv_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

auto parse_json_rows(std::string_view text, std::string name, const std::optional<Schema>& schema) -> Table {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("json '" + name + "': " + e.what());
    }
    if (!doc.is_array()) {
        throw IoError("json '" + name + "': expected an array of row objects");
    }
    std::vector<std::string> columns;
    if (schema) {
        columns = schema->column_names();
    } else if (!doc.empty()) {
        if (!doc.front().is_object()) throw IoError("json '" + name + "': rows must be objects");
        for (const auto& [key, _] : doc.front().items()) columns.push_back(key);
    }
    std::vector<Row> rows;
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& obj = doc[r];
        if (!obj.is_object()) throw IoError("json '" + name + "': rows must be objects");
        for (const auto& [key, _] : obj.items()) {
            if (std::find(columns.begin(), columns.end(), key) == columns.end()) {
                throw IoError("json '" + name + "': row " + std::to_string(r) + " has unknown key '" + key + "'");
            }
        }
        Row row;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            Value v = obj.contains(columns[c]) ? value_from_json(obj[columns[c]]) : Value{};
            if (schema) {
                const auto dtype = schema->columns[c].dtype;
                if (!v.is_null() && v.kind() != dtype) {
                    if (!(dtype == Kind::Real && v.kind() == Kind::Integer)) {
                        throw IoError("json '" + name + "': column '" + columns[c] + "' expects " +
                                      std::string(kind_name(dtype)));
                    }
                    v = Value(static_cast<double>(v.as_int()));
                }
            }
            row.push_back(std::move(v));
        }
        rows.push_back(std::move(row));
    }
    try {
        if (schema) {
            Schema s = *schema;
            s.table_name = name;
            return Table(std::move(s), std::move(rows));
        }
        return Table::infer(std::move(name), std::move(columns), std::move(rows));
    } catch (const TypeError& e) {
        throw IoError(e.what());
    }
}

auto to_json_rows(const Table& t) -> std::string {
    json arr = json::array();
    const auto names = t.column_names();
    for (const auto& row : t.rows()) {
        json obj = json::object();
        for (std::size_t c = 0; c < names.size(); ++c) obj[names[c]] = value_to_json(row[c]);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

auto table_to_json(const Table& t) -> json {
    json out;
    out["name"] = t.name();
    json cols = json::array();
    for (const auto& c : t.schema().columns) {
        cols.push_back(json{{"name", c.name}, {"dtype", std::string(kind_name(c.dtype))}});
    }
    out["columns"] = std::move(cols);
    json rows = json::array();
    for (const auto& row : t.rows()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(value_to_json(v));
        rows.push_back(std::move(r));
    }
    out["rows"] = std::move(rows);
    return out;
}

auto table_from_json(const json& j) -> Table {
    try {
        Schema s{j.at("name").get<std::string>(), std::nullopt, {}};
        for (const auto& c : j.at("columns")) {
            auto dtype = parse_kind(c.at("dtype").get<std::string>());
            if (!dtype) throw IoError("table json: bad dtype");
            s.columns.push_back({c.at("name").get<std::string>(), *dtype, std::nullopt});
        }
        std::vector<Row> rows;
        for (const auto& r : j.at("rows")) {
            Row row;
            std::size_t c = 0;
            for (const auto& cell : r) {
                Value v = value_from_json(cell);
                if (c < s.columns.size() && s.columns[c].dtype == Kind::Real && v.kind() == Kind::Integer) {
                    v = Value(static_cast<double>(v.as_int()));
                }
                row.push_back(std::move(v));
                ++c;
            }
            rows.push_back(std::move(row));
        }
        return Table(std::move(s), std::move(rows));
    } catch (const json::exception& e) {
        throw IoError(std::string("table json: ") + e.what());
    } catch (const TypeError& e) {
        throw IoError(std::string("table json: ") + e.what());
    }
}

auto read_text_file(const fs::path& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
}

auto read_table(const fs::path& path, TableFormat format, std::optional<std::string> name) -> Table {
    auto table_name = name ? *name : path.stem().string();
    std::optional<Schema> schema;
    const auto side = sidecar_path(path);
    if (fs::exists(side)) {
        try {
            schema = schema_from_json(json::parse(read_text_file(side)));
        } catch (const json::exception& e) {
            throw IoError("sidecar '" + side.string() + "': " + e.what());
        }
        if (!name && !schema->table_name.empty()) {
            table_name = schema->table_name;
        }
    }
    const auto text = read_text_file(path);
    Table t = format == TableFormat::Csv ? parse_csv(text, table_name, schema)
                                         : parse_json_rows(text, table_name, schema);
    return t;
}

void write_table(const fs::path& path, const Table& t, TableFormat format, bool with_sidecar) {
    write_text_file(path, format == TableFormat::Csv ? to_csv(t) : to_json_rows(t));
    if (with_sidecar) {
        write_text_file(sidecar_path(path), schema_to_json(t.schema()).dump(2) + "\n");
    }
}

} // namespace adp
