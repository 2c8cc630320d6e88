#pragma once

#include <adp/operators.hpp>

#include <optional>
#include <string>
#include <vector>

namespace adp {

using OpList = std::vector<OperatorInstance>;

struct Pipeline {
    TableSet sources;
    OpList ops;
};

struct PipelineFailure {
    std::size_t index;
    ExecError error;
};

/// states[0] is the source set; on failure the trace stops at the state the failing op received.
struct ExecutionTrace {
    std::vector<TableSet> states;
    std::optional<PipelineFailure> failure;

    [[nodiscard]] auto ok() const -> bool { return !failure.has_value(); }
    [[nodiscard]] auto last() const -> const TableSet& { return states.back(); }
};

auto run_pipeline(const Pipeline& p, const ExecContext& ctx = {}) -> ExecutionTrace;

/// The named table of the last state, or its only table when no name is given.
/// Throws Error when the trace failed, the name is missing, or the choice is ambiguous.
auto final_table(const ExecutionTrace& trace, const std::optional<std::string>& target_name = std::nullopt)
    -> Table;
auto pick_table(const TableSet& state, const std::optional<std::string>& target_name) -> Table;

/// One operator call per line.
auto serialize_pipeline(const OpList& ops) -> std::string;
/// Blank lines and `#` comments are skipped. ParseError::offset() is the 1-based line number.
auto parse_pipeline(std::string_view text) -> OpList;

} // namespace adp
