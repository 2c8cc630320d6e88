#include <adp/datetime.hpp>
#include <adp/synthesis.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace adp {

namespace {

auto quote(std::string_view s) -> std::string {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += ch;
        }
    }
    return out + "\"";
}

struct Rejected {
    std::string reason;
};

/// Picks max(1, round(intensity * n)) distinct indices in [0, n), sorted.
auto pick_rows(std::mt19937_64& rng, std::size_t n, double intensity) -> std::vector<std::size_t> {
    auto k = static_cast<std::size_t>(std::llround(intensity * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + bounded_draw(rng, n - i);
        std::swap(all[i], all[j]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

auto same_schema(const Table& t, std::vector<Row> rows) -> Table { return Table(t.schema(), std::move(rows)); }

auto dedup_inverse(const Table& t, const Corruption& c, std::mt19937_64& rng) -> std::pair<Table, std::string> {
    if (t.row_count() == 0) throw Rejected{"table is empty"};
    const auto picked = pick_rows(rng, t.row_count(), c.intensity);
    std::vector<Row> rows;
    std::size_t next = 0;
    for (std::size_t i = 0; i < t.row_count(); ++i) {
        rows.push_back(t.rows()[i]);
        if (next < picked.size() && picked[next] == i) {
            rows.push_back(t.rows()[i]);
            ++next;
        }
    }
    const std::string subset = c.column.empty() ? "null" : "[" + quote(c.column) + "]";
    return {same_schema(t, std::move(rows)),
            "Deduplicate(" + quote(t.name()) + ", " + subset + ", \"first\")"};
}

auto dropna_inverse(const Table& t, std::size_t col, const Corruption& c, std::mt19937_64& rng)
    -> std::pair<Table, std::string> {
    if (t.row_count() == 0) throw Rejected{"table is empty"};
    const auto picked = pick_rows(rng, t.row_count(), c.intensity);
    std::vector<Row> rows = t.rows();
    // junk rows copy a random existing row with the column blanked, inserted at random positions
    for (std::size_t n = 0; n < picked.size(); ++n) {
        Row junk = t.rows()[bounded_draw(rng, t.row_count())];
        junk[col] = Value{};
        const auto at = bounded_draw(rng, rows.size() + 1);
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(at), std::move(junk));
    }
    return {same_schema(t, std::move(rows)),
            "DropNA(" + quote(t.name()) + ", [" + quote(c.column) + "], \"any\")"};
}

auto datetime_inverse(const Table& t, std::size_t col, const Corruption& c, std::mt19937_64& rng)
    -> std::pair<Table, std::string> {
    if (t.schema().columns[col].dtype != Kind::Text) throw Rejected{"column is not text"};
    if (t.row_count() == 0) throw Rejected{"table is empty"};
    static constexpr std::string_view date_forms[] = {"%m/%d/%y", "%Y/%m/%d", "%m/%d/%Y", "%B %d, %Y",
                                                      "%d %B %Y", "%d.%m.%Y", "%d-%m-%Y"};
    static constexpr std::string_view time_forms[] = {"%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"};
    const bool has_time = c.format.find("%H") != std::string::npos;
    const auto picked = pick_rows(rng, t.row_count(), c.intensity);
    std::vector<Row> rows = t.rows();
    for (auto i : picked) {
        const auto& cell = rows[i][col];
        if (cell.is_null()) continue;
        const auto dt = parse_datetime(cell.as_text(), c.format);
        if (!dt) throw Rejected{"cell '" + cell.as_text() + "' is not in format " + c.format};
        const auto form = has_time ? time_forms[bounded_draw(rng, std::size(time_forms))]
                                   : date_forms[bounded_draw(rng, std::size(date_forms))];
        rows[i][col] = Value(format_datetime(*dt, form));
    }
    return {same_schema(t, std::move(rows)), "StandardizeDatetime(" + quote(t.name()) + ", " + quote(t.schema().columns[col].name) +
                                                 ", " + quote(c.format) + ")"};
}

auto casing_inverse(const Table& t, std::size_t col, const Corruption& c, std::mt19937_64& rng)
    -> std::pair<Table, std::string> {
    if (t.schema().columns[col].dtype != Kind::Text) throw Rejected{"column is not text"};
    if (t.row_count() == 0) throw Rejected{"table is empty"};
    bool all_lower = true;
    for (const auto& r : t.rows()) {
        if (r[col].is_null()) continue;
        for (unsigned char ch : r[col].as_text()) all_lower = all_lower && !std::isupper(ch);
    }
    const auto picked = pick_rows(rng, t.row_count(), c.intensity);
    std::vector<Row> rows = t.rows();
    for (auto i : picked) {
        if (rows[i][col].is_null()) continue;
        std::string s = rows[i][col].as_text();
        const auto style = bounded_draw(rng, 3);
        bool start = true;
        for (auto& ch : s) {
            const auto u = static_cast<unsigned char>(ch);
            if (style == 0) {
                ch = static_cast<char>(std::toupper(u));
            } else if (style == 1) {
                ch = static_cast<char>(std::tolower(u));
            } else {
                ch = static_cast<char>(start ? std::toupper(u) : std::tolower(u));
            }
            start = !std::isalnum(u);
        }
        rows[i][col] = Value(std::move(s));
    }
    const std::string fn = all_lower ? "lower" : "upper";
    const auto expr = print_expr(*make_call(fn, {make_column(t.schema().columns[col].name)}));
    return {same_schema(t, std::move(rows)), "ValueTransform(" + quote(t.name()) + ", " +
                                                 quote(t.schema().columns[col].name) + ", " + quote(expr) + ")"};
}

auto type_inverse(const Table& t, std::size_t col) -> std::pair<Table, std::string> {
    const auto dtype = t.schema().columns[col].dtype;
    if (dtype != Kind::Integer && dtype != Kind::Real) throw Rejected{"column is not numeric"};
    Schema schema = t.schema();
    schema.columns[col].dtype = Kind::Text;
    std::vector<Row> rows = t.rows();
    for (auto& r : rows) {
        if (!r[col].is_null()) r[col] = Value(render(r[col]));
    }
    return {Table(std::move(schema), std::move(rows)),
            "CastType(" + quote(t.name()) + ", " + quote(t.schema().columns[col].name) + ", " +
                quote(dtype == Kind::Integer ? "int" : "real") + ")"};
}

} // namespace

auto bounded_draw(std::mt19937_64& rng, std::uint64_t n) -> std::uint64_t {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

auto corruption_kind_name(CorruptionKind k) -> std::string_view {
    switch (k) {
    case CorruptionKind::DedupInverse: return "dedup_inverse";
    case CorruptionKind::DropnaInverse: return "dropna_inverse";
    case CorruptionKind::DatetimeInverse: return "datetime_inverse";
    case CorruptionKind::CasingInverse: return "casing_inverse";
    case CorruptionKind::TypeInverse: return "type_inverse";
    }
    return "unknown";
}

auto parse_corruption_kind(std::string_view s) -> CorruptionKind {
    for (auto k : {CorruptionKind::DedupInverse, CorruptionKind::DropnaInverse, CorruptionKind::DatetimeInverse,
                   CorruptionKind::CasingInverse, CorruptionKind::TypeInverse}) {
        if (corruption_kind_name(k) == s) return k;
    }
    throw Error("unknown corruption kind '" + std::string(s) + "'");
}

auto corrupt_reversibly(const TableSet& state, const Corruption& c) -> CorruptionOutcome {
    CorruptionOutcome out;
    out.state = state;
    if (!(c.intensity > 0.0 && c.intensity <= 1.0)) {
        out.reason = "intensity must be in (0, 1]";
        return out;
    }
    const auto table = state.find(c.table);
    if (!table) {
        out.reason = "missing table " + c.table;
        return out;
    }
    std::optional<std::size_t> col;
    if (!c.column.empty()) {
        col = table->column_index(c.column);
        if (!col) {
            out.reason = "missing column " + c.column;
            return out;
        }
    } else if (c.kind != CorruptionKind::DedupInverse) {
        out.reason = "corruption needs a column";
        return out;
    }

    std::mt19937_64 rng(c.seed);
    std::pair<Table, std::string> applied;
    try {
        switch (c.kind) {
        case CorruptionKind::DedupInverse: applied = dedup_inverse(*table, c, rng); break;
        case CorruptionKind::DropnaInverse: applied = dropna_inverse(*table, *col, c, rng); break;
        case CorruptionKind::DatetimeInverse: applied = datetime_inverse(*table, *col, c, rng); break;
        case CorruptionKind::CasingInverse: applied = casing_inverse(*table, *col, c, rng); break;
        case CorruptionKind::TypeInverse: applied = type_inverse(*table, *col); break;
        }
    } catch (const Rejected& r) {
        out.reason = r.reason;
        return out;
    }
    auto& [corrupted, cleaner_text] = applied;
    if (tables_equal(corrupted, *table) && corrupted.schema().columns[col.value_or(0)].dtype ==
                                               table->schema().columns[col.value_or(0)].dtype) {
        out.reason = "corruption changed nothing";
        return out;
    }
    const auto cleaner = parse_operator_call(cleaner_text);
    const auto dirty = state.with(corrupted);
    const auto restored = execute_operator(cleaner, dirty);
    if (!restored) {
        out.reason = "cleaner failed: " + restored.error().message;
        return out;
    }
    if (!table_sets_equal(*restored, state)) {
        out.reason = "restore check failed";
        return out;
    }
    out.accepted = true;
    out.state = dirty;
    out.cleaner = cleaner;
    return out;
}

} // namespace adp
