#pragma once

#include <adp/agent.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace adp {

enum class CorruptionKind { DedupInverse, DropnaInverse, DatetimeInverse, CasingInverse, TypeInverse };

auto corruption_kind_name(CorruptionKind k) -> std::string_view;
auto parse_corruption_kind(std::string_view s) -> CorruptionKind;

struct Corruption {
    std::string id;
    CorruptionKind kind = CorruptionKind::DedupInverse;
    std::string table;
    /// Empty for dedup_inverse means the whole row is the key.
    std::string column;
    double intensity = 0.2;
    std::uint64_t seed = 0;
    /// Canonical date format for datetime_inverse.
    std::string format = "%Y-%m-%d";
};

struct CorruptionOutcome {
    bool accepted = false;
    TableSet state;
    std::optional<OperatorInstance> cleaner;
    std::string reason;
};

/// Applies `c` and keeps it only if its paired cleaner restores `state` exactly.
/// On rejection `state` is returned unchanged.
auto corrupt_reversibly(const TableSet& state, const Corruption& c) -> CorruptionOutcome;

/// Index of the shortest candidate whose execution reproduces `target` (ties: earliest).
auto select_shortest_valid_pipeline(const std::vector<OpList>& candidates, const TableSet& sources,
                                    const Table& target) -> std::optional<std::size_t>;

struct ProvenanceEntry {
    Corruption corruption;
    bool accepted = false;
    std::string reason;
    std::optional<OperatorInstance> cleaner;
};

struct TaskBundle {
    std::string task_id;
    TableSet sources;
    TargetSpec target;
    std::string target_name;
    Table target_table;
    OpList gt_pipeline;
    std::vector<ProvenanceEntry> provenance;

    [[nodiscard]] auto task() const -> TaskSpec;
};

/// Produces the natural-language target description from the target schema and table.
using SchemaHook = std::function<std::string(const Schema&, const Table&)>;
auto default_schema_hook(const Schema& schema, const Table& target) -> std::string;

class SynthesisError : public Error {
public:
    SynthesisError(const std::string& message, std::string corruption_id)
        : Error(message), corruption_id_(std::move(corruption_id)) {}
    [[nodiscard]] auto corruption_id() const -> const std::string& { return corruption_id_; }

private:
    std::string corruption_id_;
};

struct SynthesisRequest {
    std::string task_id;
    TableSet clean_sources;
    OpList task_pipeline;
    std::vector<Corruption> plan;
    /// Defaults to the last task op's output table (or the only source table).
    std::optional<std::string> target_name;
    SchemaHook schema_hook = default_schema_hook;
};

auto synthesize_task(const SynthesisRequest& request) -> TaskBundle;

/// Re-executes the ground-truth pipeline; returns a description of the violation, if any.
auto check_bundle(const TaskBundle& bundle) -> std::optional<std::string>;

void write_bundle(const std::filesystem::path& dir, const TaskBundle& bundle);
auto read_bundle(const std::filesystem::path& dir) -> TaskBundle;

/// Uniform draw in [0, n) that does not depend on the standard library's distributions.
auto bounded_draw(std::mt19937_64& rng, std::uint64_t n) -> std::uint64_t;

} // namespace adp
