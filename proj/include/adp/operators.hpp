#pragma once

#include <adp/expected.hpp>
#include <adp/expr.hpp>
#include <adp/kernels.hpp>
#include <adp/table.hpp>

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adp {

enum class OpKind : std::uint8_t {
    // cleaning
    DropNA,
    MissingValueImputation,
    Deduplicate,
    ErrorDetection,
    OutlierDetection,
    // normalization
    ValueTransform,
    StandardizeDatetime,
    CastType,
    // schema editing
    RenameColumn,
    AddNewColumn,
    DropColumn,
    SplitColumn,
    Concatenate,
    SelectColumn,
    Subtitle,
    // row selection
    Filter,
    Sort,
    TopK,
    // aggregation
    GroupBy,
    Count,
    CalculateStatistic,
    // combination
    Join,
    Union,
    Append,
    // reshaping
    Pivot,
    Stack,
    WideToLong,
    Transpose,
    Explode,
    // program synthesis
    ExeCode,
};

enum class OpCategory : std::uint8_t {
    Cleaning,
    Normalization,
    SchemaEditing,
    RowSelection,
    Aggregation,
    Combination,
    Reshaping,
    ProgramSynthesis,
};

enum class ParamType : std::uint8_t {
    Table,          // existing table name
    TableList,      // list of table names
    Column,         // existing column name
    ColumnList,     // list of column names
    OptColumnList,  // list of column names or null (all columns)
    Name,           // new name (column or table)
    NameList,       // list of new names
    Expr,           // DSL source, parsed at call-parse time
    Enum,           // one of `choices`
    Integer,
    Literal,        // any scalar
    StringMap,      // {"key": "value", ...}
    BoolOrList,     // true/false or a list of them
    Script,         // opaque program text for the script backend
};

struct ParamSpec {
    std::string_view name;
    ParamType type;
    std::vector<std::string_view> choices;
};

struct OperatorSignature {
    OpKind kind;
    std::string_view name;
    OpCategory category;
    std::vector<ParamSpec> params;
};

auto operator_registry() -> std::span<const OperatorSignature>;
auto signature_of(OpKind kind) -> const OperatorSignature&;
auto find_operator(std::string_view name) -> std::optional<OpKind>;
auto operator_name(OpKind kind) -> std::string_view;
/// e.g. `Deduplicate(table, subset, keep)`.
auto describe_signature(const OperatorSignature& sig) -> std::string;

/// One bound argument. Maps only appear for StringMap parameters; `expr` is set for Expr ones.
struct Arg {
    using Map = std::vector<std::pair<std::string, Value>>;

    Value value;
    std::optional<Map> map;
    ExprPtr expr;
};

auto arg_equal(const Arg& a, const Arg& b) -> bool;

/// An operator type bound to parameters. Arguments are positional, in registry order.
class OperatorInstance {
public:
    OperatorInstance(OpKind kind, std::vector<Arg> args);

    [[nodiscard]] auto kind() const -> OpKind { return kind_; }
    [[nodiscard]] auto name() const -> std::string_view { return operator_name(kind_); }
    [[nodiscard]] auto args() const -> const std::vector<Arg>& { return args_; }
    [[nodiscard]] auto signature() const -> const OperatorSignature& { return signature_of(kind_); }

    [[nodiscard]] auto arg(std::string_view param) const -> const Arg&;
    [[nodiscard]] auto text(std::string_view param) const -> const std::string&;
    [[nodiscard]] auto names(std::string_view param) const -> std::vector<std::string>;
    [[nodiscard]] auto optional_names(std::string_view param) const -> std::optional<std::vector<std::string>>;
    [[nodiscard]] auto integer(std::string_view param) const -> std::int64_t;
    [[nodiscard]] auto expr(std::string_view param) const -> const Expr&;
    [[nodiscard]] auto map(std::string_view param) const -> const Arg::Map&;

    /// Table names this instance reads (first table-typed parameters).
    [[nodiscard]] auto input_tables() const -> std::vector<std::string>;
    /// Every table and column name mentioned in the arguments, including DSL column references.
    [[nodiscard]] auto mentioned_names() const -> std::vector<std::string>;

    friend auto operator==(const OperatorInstance& a, const OperatorInstance& b) -> bool;

private:
    OpKind kind_;
    std::vector<Arg> args_;
};

/// Parses `Kind(arg, ...)`. Strings are double-quoted (bare identifiers are accepted as text),
/// lists use [..], maps use {key: value}. Throws ParseError for unknown kinds, arity mismatch,
/// bad literals or malformed embedded DSL.
auto parse_operator_call(std::string_view src) -> OperatorInstance;
/// Canonical call text; parse_operator_call(print_operator_call(op)) == op.
auto print_operator_call(const OperatorInstance& op) -> std::string;

struct ExecError {
    OperatorInstance op;
    std::string message;
    std::string detail;
};

auto describe(const ExecError& e) -> std::string;

/// Runs a program over input tables and returns exactly one table.
class ScriptBackend {
public:
    virtual ~ScriptBackend() = default;
    virtual auto run(std::string_view script, const std::vector<Table>& inputs) -> Table = 0;
};

/// Executes `command... <script-file>` with the input tables on stdin as
/// `--- table: <name>` sections of csv, and reads one csv table from stdout.
class SubprocessBackend final : public ScriptBackend {
public:
    SubprocessBackend(std::vector<std::string> command, std::chrono::milliseconds timeout);

    auto run(std::string_view script, const std::vector<Table>& inputs) -> Table override;

    /// The stdin payload sent to the script.
    static auto encode_inputs(const std::vector<Table>& inputs) -> std::string;

private:
    std::vector<std::string> command_;
    std::chrono::milliseconds timeout_;
    std::mutex mutex_;
};

struct ExecContext {
    std::shared_ptr<ScriptBackend> script_backend;
    kernels::ExecPolicy policy;
};

using ExecResult = Expected<TableSet, ExecError>;

/// Applies one operator. The input state is never modified; tables the operator does not write keep
/// their identity in the returned state. Failures come back as ExecError.
auto execute_operator(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx = {})
    -> ExecResult;

/// Name of the table an operator writes, given the current state.
auto output_table_name(const OperatorInstance& op) -> std::string;

} // namespace adp
