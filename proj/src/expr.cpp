#include <adp/expr.hpp>

#include <adp/datetime.hpp>
#include <adp/error.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>

namespace adp {

namespace {

struct Builtin {
    std::string_view name;
    std::size_t min_args;
    std::size_t max_args;
};

constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);

constexpr std::array<Builtin, 21> kBuiltins{{
    {"if", 3, 3},          {"lower", 1, 1},       {"upper", 1, 1},      {"trim", 1, 1},
    {"concat", 1, kVariadic}, {"split", 2, 2},    {"replace", 3, 3},    {"substr", 3, 3},
    {"contains", 2, 2},    {"starts_with", 2, 2}, {"is_null", 1, 1},    {"coalesce", 1, kVariadic},
    {"to_int", 1, 1},      {"to_real", 1, 1},     {"to_text", 1, 1},    {"at", 2, 2},
    {"parse_date", 2, 2},  {"format_date", 2, 2}, {"len", 1, 1},        {"abs", 1, 1},
    {"round", 1, 2},
}};

constexpr auto builtin_name_list = [] {
    std::array<std::string_view, kBuiltins.size()> out{};
    for (std::size_t i = 0; i < kBuiltins.size(); ++i) out[i] = kBuiltins[i].name;
    return out;
}();

auto find_builtin(std::string_view name) -> const Builtin* {
    for (const auto& b : kBuiltins) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

// ---------------------------------------------------------------- lexer

enum class Tok { End, Number, String, Ident, LParen, RParen, Comma, Op };

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::size_t offset = 0;
    Value number;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    auto next() -> Token {
        skip_space();
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) return t;
        const char ch = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch))) return number(t);
        if (ch == '"') return string(t);
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                ++end;
            }
            t.type = Tok::Ident;
            t.text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
            return t;
        }
        ++pos_;
        switch (ch) {
        case '(': t.type = Tok::LParen; t.text = "("; return t;
        case ')': t.type = Tok::RParen; t.text = ")"; return t;
        case ',': t.type = Tok::Comma; t.text = ","; return t;
        case '+': case '-': case '*': case '/': case '%':
            t.type = Tok::Op;
            t.text = std::string(1, ch);
            return t;
        case '=': case '!': case '<': case '>': {
            t.type = Tok::Op;
            t.text = std::string(1, ch);
            if (pos_ < src_.size() && src_[pos_] == '=') {
                t.text += '=';
                ++pos_;
            }
            if (t.text == "=" || t.text == "!") {
                throw ParseError("unexpected '" + t.text + "' at offset " + std::to_string(t.offset),
                                 t.offset);
            }
            return t;
        }
        default:
            throw ParseError("unexpected character '" + std::string(1, ch) + "' at offset " +
                                 std::to_string(t.offset),
                             t.offset);
        }
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    auto number(Token& t) -> Token {
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        bool real = false;
        if (end + 1 < src_.size() && src_[end] == '.' &&
            std::isdigit(static_cast<unsigned char>(src_[end + 1]))) {
            real = true;
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                real = true;
                end = e;
                digits();
            }
        }
        t.type = Tok::Number;
        t.text = std::string(src_.substr(pos_, end - pos_));
        if (real) {
            auto r = parse_real_strict(t.text);
            if (!r) throw ParseError("bad number at offset " + std::to_string(pos_), pos_);
            t.number = Value(*r);
        } else {
            auto i = parse_int_strict(t.text);
            if (!i) throw ParseError("integer literal out of range at offset " + std::to_string(pos_), pos_);
            t.number = Value(*i);
        }
        pos_ = end;
        return t;
    }

    auto string(Token& t) -> Token {
        std::size_t i = pos_ + 1;
        std::string out;
        while (true) {
            if (i >= src_.size()) {
                throw ParseError("unterminated string starting at offset " + std::to_string(pos_), pos_);
            }
            const char ch = src_[i++];
            if (ch == '"') break;
            if (ch == '\\') {
                if (i >= src_.size()) {
                    throw ParseError("unterminated escape at offset " + std::to_string(i - 1), i - 1);
                }
                const char esc = src_[i++];
                switch (esc) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default:
                    throw ParseError("unknown escape '\\" + std::string(1, esc) + "' at offset " +
                                         std::to_string(i - 2),
                                     i - 2);
                }
                continue;
            }
            out += ch;
        }
        t.type = Tok::String;
        t.text = std::move(out);
        pos_ = i;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    auto parse() -> ExprPtr {
        auto e = parse_or();
        if (cur_.type != Tok::End) fail("end of expression");
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(std::string_view expected) const {
        const std::string found = cur_.type == Tok::End ? "end of input" : "'" + cur_.text + "'";
        throw ParseError("syntax error at offset " + std::to_string(cur_.offset) + ": expected " +
                             std::string(expected) + ", found " + found,
                         cur_.offset);
    }

    auto is_keyword(std::string_view kw) const -> bool {
        return cur_.type == Tok::Ident && cur_.text == kw;
    }
    auto is_op(std::string_view op) const -> bool { return cur_.type == Tok::Op && cur_.text == op; }

    auto parse_or() -> ExprPtr {
        auto lhs = parse_and();
        while (is_keyword("or")) {
            advance();
            lhs = make_binary(ExprOp::Or, lhs, parse_and());
        }
        return lhs;
    }

    auto parse_and() -> ExprPtr {
        auto lhs = parse_comparison();
        while (is_keyword("and")) {
            advance();
            lhs = make_binary(ExprOp::And, lhs, parse_comparison());
        }
        return lhs;
    }

    auto parse_comparison() -> ExprPtr {
        auto lhs = parse_additive();
        static constexpr std::array<std::pair<std::string_view, ExprOp>, 6> ops{{
            {"==", ExprOp::Eq}, {"!=", ExprOp::Ne}, {"<", ExprOp::Lt},
            {"<=", ExprOp::Le}, {">", ExprOp::Gt},  {">=", ExprOp::Ge},
        }};
        for (const auto& [text, op] : ops) {
            if (is_op(text)) {
                advance();
                return make_binary(op, lhs, parse_additive());
            }
        }
        return lhs;
    }

    auto parse_additive() -> ExprPtr {
        auto lhs = parse_multiplicative();
        while (is_op("+") || is_op("-")) {
            const auto op = cur_.text == "+" ? ExprOp::Add : ExprOp::Sub;
            advance();
            lhs = make_binary(op, lhs, parse_multiplicative());
        }
        return lhs;
    }

    auto parse_multiplicative() -> ExprPtr {
        auto lhs = parse_unary();
        while (is_op("*") || is_op("/") || is_op("%")) {
            const auto op = cur_.text == "*" ? ExprOp::Mul : (cur_.text == "/" ? ExprOp::Div : ExprOp::Mod);
            advance();
            lhs = make_binary(op, lhs, parse_unary());
        }
        return lhs;
    }

    auto parse_unary() -> ExprPtr {
        if (is_op("-")) {
            advance();
            if (cur_.type == Tok::Number) {
                // Fold negative literals so printed literals round-trip.
                Value v = cur_.number;
                advance();
                if (v.kind() == Kind::Integer) return make_literal(Value(-v.as_int()));
                return make_literal(Value(-v.as_real()));
            }
            return make_unary(ExprOp::Neg, parse_unary());
        }
        if (is_keyword("not")) {
            advance();
            return make_unary(ExprOp::Not, parse_unary());
        }
        return parse_primary();
    }

    auto parse_primary() -> ExprPtr {
        switch (cur_.type) {
        case Tok::Number: {
            auto e = make_literal(cur_.number);
            advance();
            return e;
        }
        case Tok::String: {
            auto e = make_literal(Value(cur_.text));
            advance();
            return e;
        }
        case Tok::LParen: {
            advance();
            auto e = parse_or();
            if (cur_.type != Tok::RParen) fail("')'");
            advance();
            return e;
        }
        case Tok::Ident: return parse_ident();
        default: fail("expression");
        }
    }

    auto parse_ident() -> ExprPtr {
        const Token ident = cur_;
        if (ident.text == "true" || ident.text == "false") {
            advance();
            return make_literal(Value(ident.text == "true"));
        }
        if (ident.text == "null") {
            advance();
            return make_literal(Value{});
        }
        if (ident.text == "and" || ident.text == "or" || ident.text == "not") fail("expression");
        advance();
        if (cur_.type != Tok::LParen) fail("'(' after '" + ident.text + "'");
        advance();
        if (ident.text == "col") {
            if (cur_.type != Tok::String) fail("string literal column name");
            auto e = make_column(cur_.text);
            advance();
            if (cur_.type != Tok::RParen) fail("')'");
            advance();
            return e;
        }
        const auto* builtin = find_builtin(ident.text);
        if (builtin == nullptr) {
            throw ParseError("unknown function '" + ident.text + "' at offset " +
                                 std::to_string(ident.offset),
                             ident.offset);
        }
        std::vector<ExprPtr> args;
        if (cur_.type != Tok::RParen) {
            args.push_back(parse_or());
            while (cur_.type == Tok::Comma) {
                advance();
                args.push_back(parse_or());
            }
        }
        if (cur_.type != Tok::RParen) fail("',' or ')'");
        advance();
        if (args.size() < builtin->min_args || args.size() > builtin->max_args) {
            throw ParseError("wrong number of arguments to '" + ident.text + "' at offset " +
                                 std::to_string(ident.offset),
                             ident.offset);
        }
        return make_call(ident.text, std::move(args));
    }

    Lexer lexer_;
    Token cur_;
};

// ---------------------------------------------------------------- printer

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

auto op_symbol(ExprOp op) -> std::string_view {
    switch (op) {
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::Div: return "/";
    case ExprOp::Mod: return "%";
    case ExprOp::Eq: return "==";
    case ExprOp::Ne: return "!=";
    case ExprOp::Lt: return "<";
    case ExprOp::Le: return "<=";
    case ExprOp::Gt: return ">";
    case ExprOp::Ge: return ">=";
    case ExprOp::And: return "and";
    case ExprOp::Or: return "or";
    default: return "?";
    }
}

void print_into(const Expr& e, std::string& out) {
    switch (e.op) {
    case ExprOp::Literal:
        out += e.literal.kind() == Kind::Text ? quote(e.literal.as_text()) : render(e.literal);
        return;
    case ExprOp::Column:
        out += "col(" + quote(e.name) + ")";
        return;
    case ExprOp::Neg:
        out += "-(";
        print_into(*e.args[0], out);
        out += ")";
        return;
    case ExprOp::Not:
        out += "not (";
        print_into(*e.args[0], out);
        out += ")";
        return;
    case ExprOp::Call:
        out += e.name + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i > 0) out += ", ";
            print_into(*e.args[i], out);
        }
        out += ")";
        return;
    default:
        out += "(";
        print_into(*e.args[0], out);
        out += " ";
        out += op_symbol(e.op);
        out += " ";
        print_into(*e.args[1], out);
        out += ")";
    }
}

// ---------------------------------------------------------------- evaluator

[[noreturn]] void eval_fail(const Expr& e, const std::string& message) {
    throw EvalError(message, print_expr(e));
}

auto kind_str(const Value& v) -> std::string { return std::string(kind_name(v.kind())); }

auto checked_real(const Expr& e, double r) -> Value {
    if (!std::isfinite(r)) eval_fail(e, "non-finite result");
    return Value(r);
}

auto arithmetic(const Expr& e, const Value& a, const Value& b) -> Value {
    if (a.is_null() || b.is_null()) return {};
    if (!a.is_numeric() || !b.is_numeric()) {
        eval_fail(e, "type mismatch: " + kind_str(a) + " " + std::string(op_symbol(e.op)) + " " + kind_str(b));
    }
    const bool ints = a.kind() == Kind::Integer && b.kind() == Kind::Integer;
    switch (e.op) {
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
        if (ints) {
            std::int64_t out = 0;
            bool overflow = false;
            if (e.op == ExprOp::Add) overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &out);
            if (e.op == ExprOp::Sub) overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &out);
            if (e.op == ExprOp::Mul) overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &out);
            if (overflow) eval_fail(e, "integer overflow");
            return Value(out);
        } else {
            const double x = a.as_number();
            const double y = b.as_number();
            const double r = e.op == ExprOp::Add ? x + y : (e.op == ExprOp::Sub ? x - y : x * y);
            return checked_real(e, r);
        }
    case ExprOp::Div:
        if (b.as_number() == 0.0) eval_fail(e, "division by zero");
        return checked_real(e, a.as_number() / b.as_number());
    case ExprOp::Mod:
        if (b.as_number() == 0.0) eval_fail(e, "division by zero");
        if (ints) {
            if (b.as_int() == -1) return Value(std::int64_t{0});
            return Value(a.as_int() % b.as_int());
        }
        return checked_real(e, std::fmod(a.as_number(), b.as_number()));
    default: eval_fail(e, "not an arithmetic operator");
    }
}

auto comparison(const Expr& e, const Value& a, const Value& b) -> Value {
    if (a.is_null() || b.is_null()) return {};
    const bool comparable = (a.is_numeric() && b.is_numeric()) || a.kind() == b.kind();
    if (!comparable) {
        eval_fail(e, "type mismatch: cannot compare " + kind_str(a) + " with " + kind_str(b));
    }
    const int c = compare(a, b);
    switch (e.op) {
    case ExprOp::Eq: return Value(c == 0);
    case ExprOp::Ne: return Value(c != 0);
    case ExprOp::Lt: return Value(c < 0);
    case ExprOp::Le: return Value(c <= 0);
    case ExprOp::Gt: return Value(c > 0);
    case ExprOp::Ge: return Value(c >= 0);
    default: eval_fail(e, "not a comparison operator");
    }
}

auto truth(const Expr& e, const Value& v) -> std::optional<bool> {
    if (v.is_null()) return std::nullopt;
    if (v.kind() != Kind::Boolean) eval_fail(e, "type mismatch: expected boolean, got " + kind_str(v));
    return v.as_bool();
}

auto expect_text(const Expr& e, const Value& v, std::string_view what) -> const std::string& {
    if (v.kind() != Kind::Text) {
        eval_fail(e, "type mismatch: " + std::string(what) + " expects text, got " + kind_str(v));
    }
    return v.as_text();
}

auto expect_int(const Expr& e, const Value& v, std::string_view what) -> std::int64_t {
    if (v.kind() != Kind::Integer) {
        eval_fail(e, "type mismatch: " + std::string(what) + " expects integer, got " + kind_str(v));
    }
    return v.as_int();
}

auto map_chars(std::string s, int (*fn)(int)) -> std::string {
    std::transform(s.begin(), s.end(), s.begin(),
                   [fn](unsigned char c) { return static_cast<char>(fn(c)); });
    return s;
}

auto call_builtin(const Expr& e, const RowBinding& row) -> Value {
    const auto& n = e.name;
    auto arg = [&](std::size_t i) { return eval_expr(*e.args[i], row); };

    if (n == "if") {
        const auto c = truth(e, arg(0));
        return c.value_or(false) ? arg(1) : arg(2);
    }
    if (n == "is_null") return Value(arg(0).is_null());
    if (n == "coalesce") {
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (auto v = arg(i); !v.is_null()) return v;
        }
        return {};
    }

    std::vector<Value> vals;
    vals.reserve(e.args.size());
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        vals.push_back(arg(i));
        if (vals.back().is_null()) return {};
    }

    if (n == "lower") return Value(map_chars(expect_text(e, vals[0], n), ::tolower));
    if (n == "upper") return Value(map_chars(expect_text(e, vals[0], n), ::toupper));
    if (n == "trim") {
        const auto& s = expect_text(e, vals[0], n);
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return Value(std::string{});
        const auto last = s.find_last_not_of(" \t\r\n");
        return Value(s.substr(b, last - b + 1));
    }
    if (n == "concat") {
        std::string out;
        for (const auto& v : vals) {
            if (v.kind() == Kind::List) eval_fail(e, "type mismatch: concat of list");
            out += render(v);
        }
        return Value(std::move(out));
    }
    if (n == "split") {
        const auto& s = expect_text(e, vals[0], n);
        const auto& sep = expect_text(e, vals[1], n);
        if (sep.empty()) eval_fail(e, "empty separator");
        Value::List parts;
        std::size_t start = 0;
        while (true) {
            const auto pos = s.find(sep, start);
            if (pos == std::string::npos) {
                parts.emplace_back(s.substr(start));
                break;
            }
            parts.emplace_back(s.substr(start, pos - start));
            start = pos + sep.size();
        }
        return Value(std::move(parts));
    }
    if (n == "replace") {
        std::string s = expect_text(e, vals[0], n);
        const auto& from = expect_text(e, vals[1], n);
        const auto& to = expect_text(e, vals[2], n);
        if (from.empty()) eval_fail(e, "empty search string");
        std::string out;
        std::size_t start = 0;
        while (true) {
            const auto pos = s.find(from, start);
            if (pos == std::string::npos) break;
            out += s.substr(start, pos - start);
            out += to;
            start = pos + from.size();
        }
        out += s.substr(start);
        return Value(std::move(out));
    }
    if (n == "substr") {
        const auto& s = expect_text(e, vals[0], n);
        const auto start = expect_int(e, vals[1], n);
        const auto len = expect_int(e, vals[2], n);
        if (start < 0 || len < 0) eval_fail(e, "negative substr bounds");
        if (static_cast<std::size_t>(start) >= s.size()) return Value(std::string{});
        return Value(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(len)));
    }
    if (n == "contains") {
        if (vals[0].kind() == Kind::List) {
            const auto& items = vals[0].as_list();
            return Value(std::any_of(items.begin(), items.end(),
                                     [&](const Value& v) { return v == vals[1]; }));
        }
        return Value(expect_text(e, vals[0], n).find(expect_text(e, vals[1], n)) != std::string::npos);
    }
    if (n == "starts_with") {
        const auto& s = expect_text(e, vals[0], n);
        const auto& p = expect_text(e, vals[1], n);
        return Value(s.compare(0, p.size(), p) == 0 && s.size() >= p.size());
    }
    if (n == "to_int" || n == "to_real" || n == "to_text") {
        const Kind target = n == "to_int" ? Kind::Integer : (n == "to_real" ? Kind::Real : Kind::Text);
        try {
            return cast_value(vals[0], target);
        } catch (const TypeError& err) {
            eval_fail(e, std::string("cast failure: ") + err.what());
        }
    }
    if (n == "at") {
        if (vals[0].kind() != Kind::List) eval_fail(e, "type mismatch: at expects list, got " + kind_str(vals[0]));
        const auto& items = vals[0].as_list();
        auto i = expect_int(e, vals[1], n);
        if (i < 0) i += static_cast<std::int64_t>(items.size());
        if (i < 0 || static_cast<std::size_t>(i) >= items.size()) return {};
        return items[static_cast<std::size_t>(i)];
    }
    if (n == "parse_date") {
        const auto& s = expect_text(e, vals[0], n);
        const auto& fmt = expect_text(e, vals[1], n);
        auto dt = parse_datetime(s, fmt);
        if (!dt) eval_fail(e, "date parse failure: '" + s + "' does not match '" + fmt + "'");
        return Value(to_epoch_seconds(*dt));
    }
    if (n == "format_date") {
        const auto& fmt = expect_text(e, vals[1], n);
        if (vals[0].kind() == Kind::Integer) return Value(format_datetime(from_epoch_seconds(vals[0].as_int()), fmt));
        const auto& s = expect_text(e, vals[0], n);
        auto dt = parse_datetime_any(s);
        if (!dt) eval_fail(e, "date parse failure: '" + s + "'");
        return Value(format_datetime(*dt, fmt));
    }
    if (n == "len") {
        if (vals[0].kind() == Kind::List) return Value(static_cast<std::int64_t>(vals[0].as_list().size()));
        return Value(static_cast<std::int64_t>(expect_text(e, vals[0], n).size()));
    }
    if (n == "abs") {
        if (vals[0].kind() == Kind::Integer) {
            if (vals[0].as_int() == INT64_MIN) eval_fail(e, "integer overflow");
            return Value(std::abs(vals[0].as_int()));
        }
        if (vals[0].kind() == Kind::Real) return Value(std::fabs(vals[0].as_real()));
        eval_fail(e, "type mismatch: abs expects number, got " + kind_str(vals[0]));
    }
    if (n == "round") {
        if (vals[0].kind() == Kind::Integer) return vals[0];
        if (vals[0].kind() != Kind::Real) eval_fail(e, "type mismatch: round expects number, got " + kind_str(vals[0]));
        const std::int64_t digits = vals.size() > 1 ? expect_int(e, vals[1], n) : 0;
        const double scale = std::pow(10.0, static_cast<double>(digits));
        return checked_real(e, std::round(vals[0].as_real() * scale) / scale);
    }
    eval_fail(e, "unknown function '" + n + "'");
}

void collect_columns(const Expr& e, std::vector<std::string>& out) {
    if (e.op == ExprOp::Column && std::find(out.begin(), out.end(), e.name) == out.end()) {
        out.push_back(e.name);
    }
    for (const auto& a : e.args) collect_columns(*a, out);
}

} // namespace

auto make_literal(Value v) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{ExprOp::Literal, std::move(v), {}, {}});
}

auto make_column(std::string name) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{ExprOp::Column, {}, std::move(name), {}});
}

auto make_unary(ExprOp op, ExprPtr operand) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{op, {}, {}, {std::move(operand)}});
}

auto make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{op, {}, {}, {std::move(lhs), std::move(rhs)}});
}

auto make_call(std::string name, std::vector<ExprPtr> args) -> ExprPtr {
    const auto* b = find_builtin(name);
    if (b == nullptr) throw ParseError("unknown function '" + name + "'", 0);
    if (args.size() < b->min_args || args.size() > b->max_args) {
        throw ParseError("wrong number of arguments to '" + name + "'", 0);
    }
    return std::make_shared<const Expr>(Expr{ExprOp::Call, {}, std::move(name), std::move(args)});
}

auto builtin_names() -> std::span<const std::string_view> { return builtin_name_list; }

auto parse_expr(std::string_view src) -> ExprPtr {
    if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError("empty expression", 0);
    }
    return Parser(src).parse();
}

auto print_expr(const Expr& e) -> std::string {
    std::string out;
    print_into(e, out);
    return out;
}

auto expr_equal(const Expr& a, const Expr& b) -> bool {
    if (a.op != b.op || a.name != b.name || !a.literal.identical(b.literal) || a.args.size() != b.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

auto referenced_columns(const Expr& e) -> std::vector<std::string> {
    std::vector<std::string> out;
    collect_columns(e, out);
    return out;
}

auto RowBinding::lookup(std::string_view name) const -> const Value* {
    if (restricted_) {
        for (auto i : visible_) {
            if (columns_[i].name == name) return &row_[i];
        }
        return nullptr;
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return &row_[i];
    }
    return nullptr;
}

auto eval_expr(const Expr& e, const RowBinding& row) -> Value {
    switch (e.op) {
    case ExprOp::Literal: return e.literal;
    case ExprOp::Column: {
        const Value* v = row.lookup(e.name);
        if (v == nullptr) eval_fail(e, "unknown column '" + e.name + "'");
        return *v;
    }
    case ExprOp::Neg: {
        const Value v = eval_expr(*e.args[0], row);
        if (v.is_null()) return {};
        if (v.kind() == Kind::Integer) {
            if (v.as_int() == INT64_MIN) eval_fail(e, "integer overflow");
            return Value(-v.as_int());
        }
        if (v.kind() == Kind::Real) return Value(-v.as_real());
        eval_fail(e, "type mismatch: cannot negate " + kind_str(v));
    }
    case ExprOp::Not: {
        const auto t = truth(e, eval_expr(*e.args[0], row));
        return t ? Value(!*t) : Value{};
    }
    case ExprOp::And: {
        const auto l = truth(e, eval_expr(*e.args[0], row));
        if (l == false) return Value(false);
        const auto r = truth(e, eval_expr(*e.args[1], row));
        if (r == false) return Value(false);
        if (!l || !r) return {};
        return Value(true);
    }
    case ExprOp::Or: {
        const auto l = truth(e, eval_expr(*e.args[0], row));
        if (l == true) return Value(true);
        const auto r = truth(e, eval_expr(*e.args[1], row));
        if (r == true) return Value(true);
        if (!l || !r) return {};
        return Value(false);
    }
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Mod:
        return arithmetic(e, eval_expr(*e.args[0], row), eval_expr(*e.args[1], row));
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
        return comparison(e, eval_expr(*e.args[0], row), eval_expr(*e.args[1], row));
    case ExprOp::Call: return call_builtin(e, row);
    }
    eval_fail(e, "unknown node");
}

} // namespace adp
