#include <adp/table.hpp>

#include <adp/error.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace adp {

auto Schema::column_index(std::string_view name) const -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

auto Schema::column_names() const -> std::vector<std::string> {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) {
        out.push_back(c.name);
    }
    return out;
}

Table::Table(Schema schema, std::vector<Row> rows) : schema_(std::move(schema)), rows_(std::move(rows)) {
    std::set<std::string_view> seen;
    for (const auto& col : schema_.columns) {
        if (col.name.empty()) {
            throw TypeError("table '" + schema_.table_name + "': empty column name");
        }
        if (!seen.insert(col.name).second) {
            throw TypeError("table '" + schema_.table_name + "': duplicate column '" + col.name + "'");
        }
    }
    const auto width = schema_.columns.size();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != width) {
            throw TypeError("table '" + schema_.table_name + "': row " + std::to_string(r) + " has " +
                            std::to_string(rows_[r].size()) + " cells, expected " +
                            std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const auto& cell = rows_[r][c];
            if (!cell.is_null() && cell.kind() != schema_.columns[c].dtype) {
                throw TypeError("table '" + schema_.table_name + "': column '" +
                                schema_.columns[c].name + "' has dtype " +
                                std::string(kind_name(schema_.columns[c].dtype)) + " but row " +
                                std::to_string(r) + " holds " +
                                std::string(kind_name(cell.kind())));
            }
        }
    }
}

auto infer_column_kind(std::span<const Value> cells) -> Kind {
    Kind kind = Kind::Null;
    for (const auto& cell : cells) {
        const Kind k = cell.kind();
        if (k == Kind::Null || k == kind) {
            continue;
        }
        if (kind == Kind::Null) {
            kind = k;
        } else if ((kind == Kind::Integer && k == Kind::Real) ||
                   (kind == Kind::Real && k == Kind::Integer)) {
            kind = Kind::Real;
        } else {
            throw TypeError("column mixes " + std::string(kind_name(kind)) + " and " +
                            std::string(kind_name(k)) + " values");
        }
    }
    return kind;
}

void conform_column(std::vector<Value>& cells, Kind dtype) {
    if (dtype != Kind::Real) {
        return;
    }
    for (auto& cell : cells) {
        if (cell.kind() == Kind::Integer) {
            cell = Value(static_cast<double>(cell.as_int()));
        }
    }
}

auto Table::infer(std::string name, std::vector<std::string> columns, std::vector<Row> rows) -> Table {
    Schema schema{std::move(name), std::nullopt, {}};
    const auto width = columns.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw TypeError("table '" + schema.table_name + "': row " + std::to_string(r) +
                            " has " + std::to_string(rows[r].size()) + " cells, expected " +
                            std::to_string(width));
        }
    }
    for (std::size_t c = 0; c < width; ++c) {
        std::vector<Value> cells;
        cells.reserve(rows.size());
        for (auto& row : rows) {
            cells.push_back(std::move(row[c]));
        }
        Kind dtype = Kind::Null;
        try {
            dtype = infer_column_kind(cells);
        } catch (const TypeError& e) {
            throw TypeError("column '" + columns[c] + "': " + e.what());
        }
        conform_column(cells, dtype);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            rows[r][c] = std::move(cells[r]);
        }
        schema.columns.push_back({std::move(columns[c]), dtype, std::nullopt});
    }
    return Table(std::move(schema), std::move(rows));
}

auto Table::column_values(std::size_t index) const -> std::vector<Value> {
    std::vector<Value> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        out.push_back(row[index]);
    }
    return out;
}

auto Table::renamed(std::string name) const -> Table {
    Table copy = *this;
    copy.schema_.table_name = std::move(name);
    return copy;
}

auto canonicalize(const Table& t) -> Table {
    std::vector<std::size_t> order(t.column_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& cols = t.schema().columns;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cols[a].name < cols[b].name; });

    Schema schema{t.name(), t.schema().description, {}};
    for (auto i : order) {
        schema.columns.push_back(cols[i]);
    }
    std::vector<Row> rows;
    rows.reserve(t.row_count());
    for (const auto& row : t.rows()) {
        Row out;
        out.reserve(order.size());
        for (auto i : order) {
            out.push_back(row[i]);
        }
        rows.push_back(std::move(out));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (const int c = compare(a[i], b[i]); c != 0) {
                return c < 0;
            }
        }
        return false;
    });
    return Table(std::move(schema), std::move(rows));
}

auto tables_equal(const Table& a, const Table& b) -> bool {
    if (a.column_count() != b.column_count() || a.row_count() != b.row_count()) {
        return false;
    }
    const auto ca = canonicalize(a);
    const auto cb = canonicalize(b);
    if (ca.column_names() != cb.column_names()) {
        return false;
    }
    for (std::size_t r = 0; r < ca.row_count(); ++r) {
        for (std::size_t c = 0; c < ca.column_count(); ++c) {
            if (compare(ca.rows()[r][c], cb.rows()[r][c]) != 0) {
                return false;
            }
        }
    }
    return true;
}

namespace {

auto markdown_cell(const std::string& s) -> std::string {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
        case '|': out += "\\|"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default: out += ch;
        }
    }
    return out;
}

void append_md_row(std::string& out, const std::vector<std::string>& cells) {
    out += '|';
    for (const auto& cell : cells) {
        out += ' ';
        out += markdown_cell(cell);
        out += " |";
    }
    out += '\n';
}

} // namespace

auto serialize_table(const Table& t, std::size_t sample_rows) -> std::string {
    std::string out;
    append_md_row(out, t.column_names());
    std::vector<std::string> dtypes;
    for (const auto& c : t.schema().columns) {
        dtypes.emplace_back(kind_name(c.dtype));
    }
    append_md_row(out, dtypes);
    const auto n = std::min(sample_rows, t.row_count());
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::string> cells;
        for (const auto& v : t.rows()[r]) {
            cells.push_back(render(v));
        }
        append_md_row(out, cells);
    }
    out += "rows: " + std::to_string(t.row_count()) + "\n";
    return out;
}

TableSet::TableSet(std::vector<Table> tables) {
    for (auto& t : tables) {
        if (contains(t.name())) {
            throw TypeError("duplicate table name '" + t.name() + "'");
        }
        put(std::move(t));
    }
}

auto TableSet::contains(std::string_view name) const -> bool {
    return tables_.find(name) != tables_.end();
}

auto TableSet::find(std::string_view name) const -> std::shared_ptr<const Table> {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : it->second;
}

auto TableSet::names() const -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& [name, _] : tables_) {
        out.push_back(name);
    }
    return out;
}

auto TableSet::with(Table table) const -> TableSet {
    TableSet copy = *this;
    copy.put(std::move(table));
    return copy;
}

void TableSet::put(Table table) {
    auto name = table.name();
    tables_[std::move(name)] = std::make_shared<const Table>(std::move(table));
}

auto table_sets_equal(const TableSet& a, const TableSet& b) -> bool {
    if (a.names() != b.names()) {
        return false;
    }
    for (const auto& [name, table] : a) {
        if (!tables_equal(*table, *b.find(name))) {
            return false;
        }
    }
    return true;
}

} // namespace adp
