#include <adp/synthesis.hpp>
#include <adp/table_io.hpp>

#include <algorithm>

namespace adp {

namespace {

using json = nlohmann::ordered_json;

auto target_of(const ExecutionTrace& trace, const OpList& ops, const std::optional<std::string>& name,
               const std::string& fallback) -> std::optional<Table> {
    if (!trace.ok()) return std::nullopt;
    const auto& last = trace.last();
    try {
        if (name) return pick_table(last, name);
        if (last.contains(fallback)) return pick_table(last, fallback);
        if (!ops.empty()) return pick_table(last, output_table_name(ops.back()));
        return pick_table(last, std::nullopt);
    } catch (const Error&) {
        return std::nullopt;
    }
}

auto corruption_to_json(const Corruption& c) -> json {
    return {{"id", c.id},
            {"kind", corruption_kind_name(c.kind)},
            {"table", c.table},
            {"column", c.column},
            {"intensity", c.intensity},
            {"seed", c.seed},
            {"format", c.format}};
}

} // namespace

auto select_shortest_valid_pipeline(const std::vector<OpList>& candidates, const TableSet& sources,
                                    const Table& target) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (best && candidates[i].size() >= candidates[*best].size()) continue;
        const auto trace = run_pipeline({sources, candidates[i]});
        const auto produced = target_of(trace, candidates[i], std::nullopt, target.name());
        if (produced && tables_equal(*produced, target)) best = i;
    }
    return best;
}

auto default_schema_hook(const Schema& schema, const Table&) -> std::string {
    std::string out = "Produce the table " + schema.table_name + " with columns ";
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (i > 0) out += i + 1 == schema.columns.size() ? " and " : ", ";
        out += schema.columns[i].name + " (" + std::string(kind_name(schema.columns[i].dtype)) + ")";
    }
    return out + ".";
}

auto TaskBundle::task() const -> TaskSpec { return TaskSpec{task_id, sources, target, target_name}; }

auto synthesize_task(const SynthesisRequest& request) -> TaskBundle {
    const auto clean_trace = run_pipeline({request.clean_sources, request.task_pipeline});
    if (!clean_trace.ok()) {
        throw SynthesisError("task pipeline fails on the clean sources: " + describe(clean_trace.failure->error), "");
    }
    std::string target_name;
    if (request.target_name) {
        target_name = *request.target_name;
    } else if (!request.task_pipeline.empty()) {
        target_name = output_table_name(request.task_pipeline.back());
    } else {
        target_name = pick_table(clean_trace.last(), std::nullopt).name();
    }

    TaskBundle bundle;
    bundle.task_id = request.task_id;
    bundle.target_name = target_name;
    bundle.target_table = final_table(clean_trace, target_name);
    bundle.target.schema = bundle.target_table.schema();
    bundle.target.schema.table_name = target_name;
    bundle.target.description = request.schema_hook(bundle.target.schema, bundle.target_table);
    bundle.target.schema.description = bundle.target.description;

    TableSet state = request.clean_sources;
    std::vector<TableSet> history{state};
    OpList cleaners;
    std::vector<std::string> accepted_ids;
    for (const auto& c : request.plan) {
        auto outcome = corrupt_reversibly(state, c);
        bundle.provenance.push_back({c, outcome.accepted, outcome.reason, outcome.cleaner});
        if (!outcome.accepted) continue;
        state = std::move(outcome.state);
        history.push_back(state);
        cleaners.push_back(*outcome.cleaner);
        accepted_ids.push_back(c.id);
    }
    bundle.sources = state;
    bundle.gt_pipeline.assign(cleaners.rbegin(), cleaners.rend());
    bundle.gt_pipeline.insert(bundle.gt_pipeline.end(), request.task_pipeline.begin(), request.task_pipeline.end());

    // the reversed cleaners must walk back through the corruption history exactly
    TableSet replay = state;
    for (std::size_t i = cleaners.size(); i-- > 0;) {
        auto r = execute_operator(cleaners[i], replay);
        if (!r || !table_sets_equal(*r, history[i])) {
            throw SynthesisError("cleaner for corruption '" + accepted_ids[i] + "' does not restore its state",
                                 accepted_ids[i]);
        }
        replay = *r;
    }
    if (auto problem = check_bundle(bundle)) throw SynthesisError(*problem, accepted_ids.empty() ? "" : accepted_ids.back());
    return bundle;
}

auto check_bundle(const TaskBundle& bundle) -> std::optional<std::string> {
    const auto trace = run_pipeline({bundle.sources, bundle.gt_pipeline});
    if (!trace.ok()) {
        return "ground-truth pipeline fails at op " + std::to_string(trace.failure->index + 1) + ": " +
               describe(trace.failure->error);
    }
    const auto produced = trace.last().find(bundle.target_name);
    if (!produced) return "ground-truth pipeline does not produce table " + bundle.target_name;
    if (!tables_equal(*produced, bundle.target_table)) return "ground-truth pipeline output differs from the target table";
    return std::nullopt;
}

void write_bundle(const std::filesystem::path& dir, const TaskBundle& bundle) {
    std::filesystem::create_directories(dir / "sources");
    for (const auto& [name, table] : bundle.sources) write_table(dir / "sources" / (name + ".csv"), *table);
    write_text_file(dir / "target_schema.json", schema_to_json(bundle.target.schema).dump(2) + "\n");
    write_table(dir / "target_table.csv", bundle.target_table.renamed(bundle.target_name));
    write_text_file(dir / "gt_pipeline.txt", serialize_pipeline(bundle.gt_pipeline));
    json corruptions = json::array();
    for (const auto& p : bundle.provenance) {
        json e = corruption_to_json(p.corruption);
        e["accepted"] = p.accepted;
        e["reason"] = p.reason;
        e["cleaner"] = p.cleaner ? json(print_operator_call(*p.cleaner)) : json(nullptr);
        corruptions.push_back(std::move(e));
    }
    json prov{{"task_id", bundle.task_id}, {"target_name", bundle.target_name}, {"corruptions", std::move(corruptions)}};
    write_text_file(dir / "provenance.json", prov.dump(2) + "\n");
}

auto read_bundle(const std::filesystem::path& dir) -> TaskBundle {
    if (!std::filesystem::is_directory(dir)) throw IoError("bundle " + dir.string() + " is not a directory");
    TaskBundle bundle;
    bundle.task_id = dir.filename().string();
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(dir / "sources")) {
        for (const auto& entry : std::filesystem::directory_iterator(dir / "sources")) {
            const auto& p = entry.path();
            if (p.extension() == ".csv") files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) bundle.sources.put(read_table(p));

    const auto schema_json = json::parse(read_text_file(dir / "target_schema.json"), nullptr, false);
    if (schema_json.is_discarded()) throw IoError("target_schema.json is not valid JSON");
    bundle.target.schema = schema_from_json(schema_json);
    bundle.target.description = bundle.target.schema.description.value_or("");
    bundle.target_name = bundle.target.schema.table_name;
    if (std::filesystem::exists(dir / "target_table.csv")) {
        bundle.target_table = read_table(dir / "target_table.csv", TableFormat::Csv, bundle.target_name);
    }
    if (std::filesystem::exists(dir / "gt_pipeline.txt")) {
        bundle.gt_pipeline = parse_pipeline(read_text_file(dir / "gt_pipeline.txt"));
    }
    if (std::filesystem::exists(dir / "provenance.json")) {
        const auto prov = json::parse(read_text_file(dir / "provenance.json"), nullptr, false);
        if (prov.is_discarded()) throw IoError("provenance.json is not valid JSON");
        bundle.task_id = prov.value("task_id", bundle.task_id);
        bundle.target_name = prov.value("target_name", bundle.target_name);
        for (const auto& e : prov.value("corruptions", json::array())) {
            ProvenanceEntry p;
            p.corruption.id = e.value("id", "");
            p.corruption.kind = parse_corruption_kind(e.value("kind", "dedup_inverse"));
            p.corruption.table = e.value("table", "");
            p.corruption.column = e.value("column", "");
            p.corruption.intensity = e.value("intensity", 0.0);
            p.corruption.seed = e.value("seed", std::uint64_t{0});
            p.corruption.format = e.value("format", "%Y-%m-%d");
            p.accepted = e.value("accepted", false);
            p.reason = e.value("reason", "");
            if (e.contains("cleaner") && e["cleaner"].is_string()) {
                p.cleaner = parse_operator_call(e["cleaner"].get<std::string>());
            }
            bundle.provenance.push_back(std::move(p));
        }
    }
    return bundle;
}

} // namespace adp
