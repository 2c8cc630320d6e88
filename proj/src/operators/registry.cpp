#include <adp/operators.hpp>

#include <adp/error.hpp>

#include <algorithm>
#include <cctype>

namespace adp {

namespace {

using PT = ParamType;

auto build_registry() -> std::vector<OperatorSignature> {
    const std::vector<std::string_view> agg_fns{"sum", "avg", "min", "max", "count", "count_distinct",
                                                "first", "last", "concat"};
    auto pivot_fns = agg_fns;
    pivot_fns.push_back("first_strict");
    return {
        {OpKind::DropNA, "DropNA", OpCategory::Cleaning,
         {{"table", PT::Table, {}}, {"subset", PT::OptColumnList, {}}, {"how", PT::Enum, {"any", "all"}}}},
        {OpKind::MissingValueImputation, "MissingValueImputation", OpCategory::Cleaning,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"mode", PT::Enum, {"mean", "median", "mode"}}}},
        {OpKind::Deduplicate, "Deduplicate", OpCategory::Cleaning,
         {{"table", PT::Table, {}}, {"subset", PT::OptColumnList, {}}, {"keep", PT::Enum, {"first", "last"}}}},
        {OpKind::ErrorDetection, "ErrorDetection", OpCategory::Cleaning,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"func", PT::Expr, {}}}},
        {OpKind::OutlierDetection, "OutlierDetection", OpCategory::Cleaning,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"action", PT::Enum, {"remove", "flag"}}}},

        {OpKind::ValueTransform, "ValueTransform", OpCategory::Normalization,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"func", PT::Expr, {}}}},
        {OpKind::StandardizeDatetime, "StandardizeDatetime", OpCategory::Normalization,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"format", PT::Name, {}}}},
        {OpKind::CastType, "CastType", OpCategory::Normalization,
         {{"table", PT::Table, {}}, {"column", PT::Column, {}}, {"dtype", PT::Enum, {"int", "real", "text", "bool"}}}},

        {OpKind::RenameColumn, "RenameColumn", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"rename_map", PT::StringMap, {}}}},
        {OpKind::AddNewColumn, "AddNewColumn", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"name", PT::Name, {}}, {"func", PT::Expr, {}}}},
        {OpKind::DropColumn, "DropColumn", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"columns", PT::ColumnList, {}}}},
        {OpKind::SplitColumn, "SplitColumn", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"source", PT::Column, {}}, {"target", PT::NameList, {}}, {"func", PT::Expr, {}}}},
        {OpKind::Concatenate, "Concatenate", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"columns", PT::ColumnList, {}}, {"target", PT::Name, {}}, {"func", PT::Expr, {}}}},
        {OpKind::SelectColumn, "SelectColumn", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"columns", PT::ColumnList, {}}}},
        {OpKind::Subtitle, "Subtitle", OpCategory::SchemaEditing,
         {{"table", PT::Table, {}}, {"title", PT::Literal, {}}, {"target_col", PT::Name, {}}}},

        {OpKind::Filter, "Filter", OpCategory::RowSelection, {{"table", PT::Table, {}}, {"func", PT::Expr, {}}}},
        {OpKind::Sort, "Sort", OpCategory::RowSelection,
         {{"table", PT::Table, {}}, {"by", PT::ColumnList, {}}, {"ascending", PT::BoolOrList, {}}}},
        {OpKind::TopK, "TopK", OpCategory::RowSelection, {{"table", PT::Table, {}}, {"k", PT::Integer, {}}}},

        {OpKind::GroupBy, "GroupBy", OpCategory::Aggregation,
         {{"table", PT::Table, {}}, {"by", PT::ColumnList, {}}, {"agg", PT::StringMap, agg_fns}}},
        {OpKind::Count, "Count", OpCategory::Aggregation, {{"table", PT::Table, {}}}},
        {OpKind::CalculateStatistic, "CalculateStatistic", OpCategory::Aggregation,
         {{"table", PT::Table, {}}, {"stat", PT::Enum, {"sum", "avg", "min", "max"}}, {"func", PT::Expr, {}}}},

        {OpKind::Join, "Join", OpCategory::Combination,
         {{"left", PT::Table, {}}, {"right", PT::Table, {}}, {"on", PT::ColumnList, {}},
          {"how", PT::Enum, {"inner", "left", "right", "outer"}}}},
        {OpKind::Union, "Union", OpCategory::Combination,
         {{"tables", PT::TableList, {}}, {"how", PT::Enum, {"all", "distinct"}}}},
        {OpKind::Append, "Append", OpCategory::Combination, {{"table", PT::Table, {}}, {"other", PT::Table, {}}}},

        {OpKind::Pivot, "Pivot", OpCategory::Reshaping,
         {{"table", PT::Table, {}}, {"index", PT::ColumnList, {}}, {"columns", PT::Column, {}},
          {"values", PT::Column, {}}, {"aggfunc", PT::Enum, pivot_fns}}},
        {OpKind::Stack, "Stack", OpCategory::Reshaping,
         {{"table", PT::Table, {}}, {"id_vars", PT::ColumnList, {}}, {"value_vars", PT::ColumnList, {}}}},
        {OpKind::WideToLong, "WideToLong", OpCategory::Reshaping,
         {{"table", PT::Table, {}}, {"stubnames", PT::NameList, {}}, {"i", PT::ColumnList, {}}, {"j", PT::Name, {}}}},
        {OpKind::Transpose, "Transpose", OpCategory::Reshaping, {{"table", PT::Table, {}}}},
        {OpKind::Explode, "Explode", OpCategory::Reshaping, {{"table", PT::Table, {}}, {"column", PT::Column, {}}}},

        {OpKind::ExeCode, "ExeCode", OpCategory::ProgramSynthesis,
         {{"tables", PT::TableList, {}}, {"target", PT::Name, {}}, {"func", PT::Script, {}}}},
    };
}

auto registry() -> const std::vector<OperatorSignature>& {
    static const auto reg = build_registry();
    return reg;
}

auto names_of(const Value& v) -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& item : v.as_list()) out.push_back(item.as_text());
    return out;
}

// ---------------------------------------------------------------- call parser

class CallParser {
public:
    explicit CallParser(std::string_view src) : src_(src) {}

    auto parse() -> OperatorInstance {
        skip();
        const auto start = pos_;
        const auto kind_name = identifier();
        if (kind_name.empty()) fail("operator name", start);
        const auto kind = find_operator(kind_name);
        if (!kind) {
            throw ParseError("unknown operator '" + kind_name + "'", start);
        }
        expect('(');
        std::vector<std::pair<Arg, std::size_t>> raw;
        skip();
        if (peek() != ')') {
            while (true) {
                skip();
                const auto at = pos_;
                raw.emplace_back(argument(), at);
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect(')');
        skip();
        if (pos_ != src_.size()) fail("end of operator call", pos_);

        const auto& sig = signature_of(*kind);
        if (raw.size() != sig.params.size()) {
            throw ParseError(std::string(sig.name) + " expects " + std::to_string(sig.params.size()) +
                                 " arguments (" + describe_signature(sig) + "), got " +
                                 std::to_string(raw.size()),
                             start);
        }
        std::vector<Arg> args;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            args.push_back(bind(sig, sig.params[i], std::move(raw[i].first), raw[i].second));
        }
        return OperatorInstance(*kind, std::move(args));
    }

private:
    [[noreturn]] void fail(std::string_view expected, std::size_t at) const {
        throw ParseError("operator call: expected " + std::string(expected) + " at offset " + std::to_string(at), at);
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    auto peek() const -> char { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    void expect(char ch) {
        skip();
        if (peek() != ch) fail(std::string("'") + ch + "'", pos_);
        ++pos_;
    }

    auto identifier() -> std::string {
        const auto start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '.')) {
            ++pos_;
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    auto string_literal() -> std::string {
        const auto start = pos_;
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= src_.size()) throw ParseError("unterminated string at offset " + std::to_string(start), start);
            const char ch = src_[pos_++];
            if (ch == '"') return out;
            if (ch == '\\') {
                if (pos_ >= src_.size()) throw ParseError("unterminated escape", pos_);
                const char esc = src_[pos_++];
                switch (esc) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: throw ParseError("bad escape in string at offset " + std::to_string(pos_ - 2), pos_ - 2);
                }
                continue;
            }
            out += ch;
        }
    }

    auto scalar() -> Value {
        skip();
        const auto start = pos_;
        const char ch = peek();
        if (ch == '"') return Value(string_literal());
        if (ch == '-' || ch == '+' || std::isdigit(static_cast<unsigned char>(ch))) {
            ++pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                    ((src_[pos_] == '-' || src_[pos_] == '+') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
                ++pos_;
            }
            const auto text = src_.substr(start, pos_ - start);
            if (auto i = parse_int_strict(text)) return Value(*i);
            if (auto r = parse_real_strict(text)) return Value(*r);
            throw ParseError("bad numeric literal '" + std::string(text) + "'", start);
        }
        const auto id = identifier();
        if (id.empty()) fail("argument", start);
        if (id == "true") return Value(true);
        if (id == "false") return Value(false);
        if (id == "null") return Value{};
        return Value(id);
    }

    auto argument() -> Arg {
        skip();
        Arg arg;
        if (peek() == '[') {
            ++pos_;
            Value::List items;
            skip();
            if (peek() != ']') {
                while (true) {
                    skip();
                    if (peek() == '[' || peek() == '{') fail("scalar list element", pos_);
                    items.push_back(scalar());
                    skip();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect(']');
            arg.value = Value(std::move(items));
            return arg;
        }
        if (peek() == '{') {
            ++pos_;
            Arg::Map entries;
            skip();
            if (peek() != '}') {
                while (true) {
                    skip();
                    const auto key_at = pos_;
                    const Value key = scalar();
                    if (key.kind() != Kind::Text) fail("string map key", key_at);
                    expect(':');
                    skip();
                    const auto val_at = pos_;
                    if (peek() == '[' || peek() == '{') fail("scalar map value", val_at);
                    entries.emplace_back(key.as_text(), scalar());
                    skip();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect('}');
            arg.map = std::move(entries);
            return arg;
        }
        arg.value = scalar();
        return arg;
    }

    static auto is_text_list(const Value& v) -> bool {
        if (v.kind() != Kind::List) return false;
        const auto& items = v.as_list();
        return std::all_of(items.begin(), items.end(), [](const Value& x) { return x.kind() == Kind::Text; });
    }

    auto bind(const OperatorSignature& sig, const ParamSpec& p, Arg arg, std::size_t at) const -> Arg {
        auto bad = [&](std::string_view what) -> ParseError {
            return ParseError(std::string(sig.name) + ": parameter '" + std::string(p.name) + "' expects " +
                                  std::string(what),
                              at);
        };
        if (arg.map && p.type != PT::StringMap) throw bad("a non-map value");
        switch (p.type) {
        case PT::Table:
        case PT::Column:
        case PT::Name:
        case PT::Script:
            if (arg.value.kind() != Kind::Text || arg.value.as_text().empty()) throw bad("a non-empty string");
            return arg;
        case PT::TableList:
        case PT::ColumnList:
        case PT::NameList:
            if (arg.value.kind() == Kind::Text) arg.value = Value(Value::List{arg.value});
            if (!is_text_list(arg.value)) throw bad("a list of strings");
            return arg;
        case PT::OptColumnList:
            if (arg.value.is_null()) return arg;
            if (arg.value.kind() == Kind::Text) arg.value = Value(Value::List{arg.value});
            if (!is_text_list(arg.value)) throw bad("a list of strings or null");
            return arg;
        case PT::Expr:
            if (arg.value.kind() != Kind::Text) throw bad("a quoted expression");
            try {
                arg.expr = parse_expr(arg.value.as_text());
            } catch (const ParseError& e) {
                throw ParseError(std::string(sig.name) + ": parameter '" + std::string(p.name) +
                                     "': embedded expression error: " + e.what(),
                                 at);
            }
            return arg;
        case PT::Enum: {
            if (arg.value.kind() != Kind::Text) throw bad("one of its allowed values");
            std::string v = arg.value.as_text();
            std::transform(v.begin(), v.end(), v.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (sig.kind == OpKind::CastType) {
                if (auto k = parse_kind(v)) {
                    switch (*k) {
                    case Kind::Integer: v = "int"; break;
                    case Kind::Real: v = "real"; break;
                    case Kind::Text: v = "text"; break;
                    case Kind::Boolean: v = "bool"; break;
                    default: break;
                    }
                }
            }
            if (std::find(p.choices.begin(), p.choices.end(), v) == p.choices.end()) {
                std::string allowed;
                for (auto c : p.choices) allowed += (allowed.empty() ? "" : "|") + std::string(c);
                throw bad("one of " + allowed + ", got '" + arg.value.as_text() + "'");
            }
            arg.value = Value(v);
            return arg;
        }
        case PT::Integer:
            if (arg.value.kind() != Kind::Integer) throw bad("an integer");
            return arg;
        case PT::Literal:
            if (arg.value.kind() == Kind::List) throw bad("a scalar literal");
            return arg;
        case PT::StringMap:
            if (!arg.map) throw bad("a {key: value} map");
            for (const auto& [k, v] : *arg.map) {
                if (v.kind() != Kind::Text) throw bad("string map values");
            }
            return arg;
        case PT::BoolOrList:
            if (arg.value.kind() == Kind::Boolean) return arg;
            if (arg.value.kind() == Kind::List) {
                const auto& items = arg.value.as_list();
                if (std::all_of(items.begin(), items.end(), [](const Value& x) { return x.kind() == Kind::Boolean; })) {
                    return arg;
                }
            }
            throw bad("a boolean or list of booleans");
        }
        return arg;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

auto quote(const std::string& s) -> std::string {
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

auto print_scalar(const Value& v) -> std::string {
    return v.kind() == Kind::Text ? quote(v.as_text()) : render(v);
}

} // namespace

auto operator_registry() -> std::span<const OperatorSignature> { return registry(); }

auto signature_of(OpKind kind) -> const OperatorSignature& {
    return registry()[static_cast<std::size_t>(kind)];
}

auto find_operator(std::string_view name) -> std::optional<OpKind> {
    for (const auto& sig : registry()) {
        if (sig.name == name) return sig.kind;
    }
    return std::nullopt;
}

auto operator_name(OpKind kind) -> std::string_view { return signature_of(kind).name; }

auto describe_signature(const OperatorSignature& sig) -> std::string {
    std::string out = std::string(sig.name) + "(";
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (i > 0) out += ", ";
        out += sig.params[i].name;
    }
    return out + ")";
}

auto arg_equal(const Arg& a, const Arg& b) -> bool {
    if (a.expr || b.expr) {
        return a.expr && b.expr && expr_equal(*a.expr, *b.expr);
    }
    if (a.map.has_value() != b.map.has_value()) return false;
    if (a.map) {
        if (a.map->size() != b.map->size()) return false;
        for (std::size_t i = 0; i < a.map->size(); ++i) {
            if ((*a.map)[i].first != (*b.map)[i].first || !(*a.map)[i].second.identical((*b.map)[i].second)) {
                return false;
            }
        }
        return true;
    }
    return a.value.identical(b.value);
}

OperatorInstance::OperatorInstance(OpKind kind, std::vector<Arg> args) : kind_(kind), args_(std::move(args)) {
    if (args_.size() != signature_of(kind_).params.size()) {
        throw ParseError(std::string(operator_name(kind_)) + ": arity mismatch", 0);
    }
}

auto OperatorInstance::arg(std::string_view param) const -> const Arg& {
    const auto& params = signature().params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name == param) return args_[i];
    }
    throw Error(std::string(name()) + " has no parameter '" + std::string(param) + "'");
}

auto OperatorInstance::text(std::string_view param) const -> const std::string& { return arg(param).value.as_text(); }

auto OperatorInstance::names(std::string_view param) const -> std::vector<std::string> {
    return names_of(arg(param).value);
}

auto OperatorInstance::optional_names(std::string_view param) const -> std::optional<std::vector<std::string>> {
    const auto& v = arg(param).value;
    if (v.is_null()) return std::nullopt;
    return names_of(v);
}

auto OperatorInstance::integer(std::string_view param) const -> std::int64_t { return arg(param).value.as_int(); }

auto OperatorInstance::expr(std::string_view param) const -> const Expr& { return *arg(param).expr; }

auto OperatorInstance::map(std::string_view param) const -> const Arg::Map& { return *arg(param).map; }

auto OperatorInstance::input_tables() const -> std::vector<std::string> {
    std::vector<std::string> out;
    const auto& params = signature().params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].type == PT::Table) out.push_back(args_[i].value.as_text());
        if (params[i].type == PT::TableList) {
            for (auto& n : names_of(args_[i].value)) out.push_back(std::move(n));
        }
    }
    return out;
}

auto OperatorInstance::mentioned_names() const -> std::vector<std::string> {
    std::vector<std::string> out;
    auto add = [&](const std::string& n) {
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    const auto& params = signature().params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& a = args_[i];
        switch (params[i].type) {
        case PT::Table:
        case PT::Column: add(a.value.as_text()); break;
        case PT::TableList:
        case PT::ColumnList:
        case PT::OptColumnList:
            if (!a.value.is_null()) {
                for (const auto& n : names_of(a.value)) add(n);
            }
            break;
        case PT::StringMap:
            for (const auto& [k, v] : *a.map) add(k);
            break;
        case PT::Expr:
            for (const auto& c : referenced_columns(*a.expr)) add(c);
            break;
        default: break;
        }
    }
    return out;
}

auto operator==(const OperatorInstance& a, const OperatorInstance& b) -> bool {
    if (a.kind_ != b.kind_ || a.args_.size() != b.args_.size()) return false;
    for (std::size_t i = 0; i < a.args_.size(); ++i) {
        if (!arg_equal(a.args_[i], b.args_[i])) return false;
    }
    return true;
}

auto parse_operator_call(std::string_view src) -> OperatorInstance {
    if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError("empty operator call", 0);
    }
    return CallParser(src).parse();
}

auto print_operator_call(const OperatorInstance& op) -> std::string {
    std::string out = std::string(op.name()) + "(";
    for (std::size_t i = 0; i < op.args().size(); ++i) {
        if (i > 0) out += ", ";
        const auto& a = op.args()[i];
        if (a.expr) {
            out += quote(print_expr(*a.expr));
        } else if (a.map) {
            out += "{";
            for (std::size_t j = 0; j < a.map->size(); ++j) {
                if (j > 0) out += ", ";
                out += quote((*a.map)[j].first) + ": " + print_scalar((*a.map)[j].second);
            }
            out += "}";
        } else if (a.value.kind() == Kind::List) {
            out += "[";
            const auto& items = a.value.as_list();
            for (std::size_t j = 0; j < items.size(); ++j) {
                if (j > 0) out += ", ";
                out += print_scalar(items[j]);
            }
            out += "]";
        } else {
            out += print_scalar(a.value);
        }
    }
    return out + ")";
}

auto describe(const ExecError& e) -> std::string {
    std::string out = std::string(e.op.name()) + " failed: " + e.message;
    if (!e.detail.empty() && e.message.find(e.detail) == std::string::npos) {
        out += " (" + e.detail + ")";
    }
    return out;
}

} // namespace adp
