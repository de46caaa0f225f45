#include "fuzz.hpp"

#include <algorithm>

#include "icon/error.hpp"

namespace icon::test {

namespace {

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[below(rng, v.size())];
}

nlohmann::json pose_json(const Pose& p) { return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}}; }

Pose random_pose(Rng& rng, const WorkspaceState& s) {
    std::uniform_real_distribution<double> u(-2.4, 2.4);
    Pose p{u(rng), 1.2, u(rng), u(rng)};
    const auto r = below(rng, 10);
    if (r < 3) {
        // Near a cell, within or just past the snap radius.
        const auto cells = s.notebook.cells();
        p = cell_pose(s.notebook, pick(rng, cells)->id);
        p.x += std::uniform_real_distribution<double>(-0.35, 0.35)(rng);
    } else if (r == 3) {
        p.x = 9.0;
    }
    return p;
}

std::vector<std::string> artifact_ids(const WorkspaceState& s, int which) {
    std::vector<std::string> out;
    for (const auto& [id, a] : s.artifacts) {
        if (which == 0 || (which == 1) == std::holds_alternative<TableArtifact>(a)) out.push_back(id);
    }
    return out;
}

std::string some_artifact(Rng& rng, const WorkspaceState& s, int which) {
    const auto ids = artifact_ids(s, which);
    if (ids.empty() || coin(rng, 0.05)) return coin(rng) ? "a999" : (s.artifacts.empty() ? "a1" : s.artifacts.begin()->first);
    return pick(rng, ids);
}

std::vector<std::string> columns_of(const WorkspaceState& s, const std::string& id) {
    std::vector<std::string> out;
    const auto it = s.artifacts.find(id);
    if (it == s.artifacts.end()) return out;
    if (const auto* t = std::get_if<TableArtifact>(&it->second)) {
        for (const auto& c : t->base->columns) out.push_back(c.name);
    }
    return out;
}

std::string some_column(Rng& rng, const WorkspaceState& s, const std::string& table) {
    auto cols = columns_of(s, table);
    if (cols.empty() || coin(rng, 0.05)) return "no_such_column";
    // Prefer columns already selected so merges get a chance.
    const auto it = s.artifacts.find(table);
    const auto& t = std::get<TableArtifact>(it->second);
    if (!t.selected_columns.empty() && coin(rng, 0.5)) {
        return *std::next(t.selected_columns.begin(), static_cast<std::ptrdiff_t>(below(rng, t.selected_columns.size())));
    }
    return pick(rng, cols);
}

std::string some_cell(Rng& rng, const WorkspaceState& s, bool prefer_pullable) {
    if (coin(rng, 0.03)) return "c99";
    const auto cells = s.notebook.cells();
    if (prefer_pullable) {
        std::vector<std::string> ids, likely;
        for (const auto* c : cells) {
            if (c->kind != CellKind::Data && c->kind != CellKind::Visualization) continue;
            ids.push_back(c->id);
            if (s.executed_cells.contains(c->id) || c->source.find("load_dataset") != std::string::npos) {
                likely.push_back(c->id);
            }
        }
        if (!likely.empty() && coin(rng, 0.7)) return pick(rng, likely);
        if (!ids.empty() && coin(rng, 0.85)) return pick(rng, ids);
    }
    return pick(rng, cells)->id;
}

const std::vector<std::string>& source_pool() {
    static const std::vector<std::string> pool{
        "",
        "w = load_dataset(\"wine\")",
        "i = load_dataset(\"iris\")",
        "k_means = 4  # range: 2..6",
        "k_nn = 2  # range: 2..8",
        "labels = kmeans(iris, k_means)",
        "plt.scatter(wine[\"alcohol\"], wine[\"hue\"])",
        "s = wine[wine[\"alcohol\"] < 12.5]",
        "knn_graph(iris[\"sepal length (cm)\"], iris[\"sepal width (cm)\"], iris[\"petal length (cm)\"], k=3, c=labels)",
        "t = pd.DataFrame({\"a\": pd.Series([1.0, 2.0], dtype=\"float64\"), \"b\": pd.Series([3.0, 4.0], dtype=\"float64\")})",
        "# note",
        "broken = nowhere",
        "plt.scatter(nope[\"x\"], nope[\"y\"])",
        "x = load_dataset(\"missing\")",
    };
    return pool;
}

}  // namespace

Command random_command(Rng& rng, const WorkspaceState& s, std::int64_t& clock) {
    static const std::vector<std::pair<std::string, int>> ops{
        {"edit_cell", 4},     {"execute", 4},       {"pull_out", 8},     {"put_in", 4},       {"drop", 4},
        {"enter_cell", 8},    {"exit_portal", 5},   {"grab", 8},         {"release", 5},      {"set_focus", 6},
        {"move_user", 2},     {"move_artifact", 2}, {"sort_table", 4},   {"filter_rows", 4},  {"remove_filter", 2},
        {"select_column", 8}, {"merge_columns", 5}, {"add_axis", 4},     {"remove_axis", 2},  {"remove_point", 3},
        {"apply_to_table", 3}, {"delete", 3},       {"report_answer", 1}, {"complete", 1},    {"bogus", 1},
    };
    int total = 0;
    for (const auto& [_, w] : ops) total += w;
    int roll = std::uniform_int_distribution<int>(0, total - 1)(rng);
    std::string op;
    for (const auto& [name, w] : ops) {
        if (roll < w) {
            op = name;
            break;
        }
        roll -= w;
    }

    // Mostly gestures that make sense in this mode, and creators while nothing exists yet.
    const bool sep = s.mode == Mode::Separated;
    if (s.artifacts.empty() && coin(rng, 0.5)) op = sep ? "enter_cell" : "pull_out";
    if (sep && op == "pull_out" && coin(rng, 0.9)) op = "enter_cell";
    if (!sep && (op == "enter_cell" || op == "exit_portal") && coin(rng, 0.9)) op = "pull_out";
    if (sep && s.active_space == Space::Artifact && op == "enter_cell" && coin(rng, 0.7)) op = "exit_portal";
    std::optional<std::string> focus_id;
    for (const auto& [id, art] : s.artifacts) {
        if (const auto* t = std::get_if<TableArtifact>(&art); t && t->selected_columns.size() >= 2 && coin(rng, 0.2)) {
            op = "merge_columns";
            focus_id = id;
        } else if (const auto* v = std::get_if<VisArtifact>(&art); v && coin(rng, 0.1)) {
            op = v->extract.kind == PlotKind::Scatter2D ? "add_axis" : "remove_axis";
            focus_id = id;
        }
    }

    Command c;
    c.op = op;
    clock += static_cast<std::int64_t>(below(rng, 3000));
    c.t = coin(rng, 0.01) && clock > 0 ? clock - 1 - static_cast<std::int64_t>(below(rng, 100)) : clock;
    auto& a = c.args;
    if (op == "edit_cell") {
        a["cell"] = some_cell(rng, s, false);
        a["source"] = coin(rng, 0.8) ? pick(rng, source_pool()) : render(random_ast(rng, 3));
    } else if (op == "execute") {
        a["cell"] = some_cell(rng, s, coin(rng));
    } else if (op == "pull_out") {
        a["cell"] = some_cell(rng, s, true);
        a["pose"] = pose_json(random_pose(rng, s));
    } else if (op == "put_in") {
        const auto id = some_artifact(rng, s, 0);
        a["artifact"] = id;
        const auto it = s.artifacts.find(id);
        const auto& origin = it == s.artifacts.end() ? std::optional<std::string>() : artifact_origin_cell(it->second);
        a["cell"] = origin && coin(rng, 0.4) ? *origin : some_cell(rng, s, false);
    } else if (op == "drop") {
        a["artifact"] = some_artifact(rng, s, 0);
        a["pose"] = pose_json(random_pose(rng, s));
    } else if (op == "enter_cell") {
        a["cell"] = some_cell(rng, s, true);
    } else if (op == "grab" || op == "release") {
        a["hand"] = coin(rng, 0.98) ? (coin(rng) ? "L" : "R") : "X";
        if (op == "grab") {
            const auto id = some_artifact(rng, s, 0);
            nlohmann::json item{{"artifact", id}};
            if (coin(rng, 0.3)) item["column"] = some_column(rng, s, id);
            a["item"] = item;
        }
    } else if (op == "set_focus") {
        std::vector<std::string> regions{"desk", "portal", "window:nowhere", "artifact:a999", "ceiling"};
        for (const auto& w : s.notebook.windows) regions.push_back("window:" + w.id);
        for (const auto& [id, _] : s.artifacts) regions.push_back("artifact:" + id);
        a["region"] = pick(rng, regions);
        a["dwell_ms"] = static_cast<std::int64_t>(below(rng, 1200));
    } else if (op == "move_user") {
        a["pose"] = pose_json(random_pose(rng, s));
    } else if (op == "move_artifact") {
        a["artifact"] = some_artifact(rng, s, 0);
        a["pose"] = pose_json(random_pose(rng, s));
    } else if (op == "sort_table" || op == "filter_rows" || op == "select_column" || op == "remove_filter" ||
               op == "merge_columns") {
        const auto id = focus_id && op == "merge_columns" ? *focus_id : some_artifact(rng, s, coin(rng, 0.95) ? 1 : 2);
        a["table"] = id;
        if (op == "remove_filter") {
            a["index"] = static_cast<std::int64_t>(below(rng, 3)) - (coin(rng, 0.05) ? 5 : 0);
        } else if (op == "merge_columns") {
            const auto it = s.artifacts.find(id);
            const auto* t = it == s.artifacts.end() ? nullptr : std::get_if<TableArtifact>(&it->second);
            if (t && t->selected_columns.size() >= 2 && coin(rng, 0.7)) {
                std::vector<std::string> sel(t->selected_columns.begin(), t->selected_columns.end());
                std::shuffle(sel.begin(), sel.end(), rng);
                a["columns"] = {sel[0], sel[1]};
            } else {
                a["columns"] = {some_column(rng, s, id), some_column(rng, s, id)};
            }
            a["pose"] = pose_json(random_pose(rng, s));
        } else {
            a["column"] = some_column(rng, s, id);
        }
        if (op == "sort_table") a["direction"] = pick(rng, std::vector<std::string>{"asc", "desc", "sideways"});
        if (op == "filter_rows") {
            a["comparator"] = pick(rng, std::vector<std::string>{"<", "<=", ">", ">=", "==", "!=", "~"});
            a["threshold"] = coin(rng, 0.9) ? nlohmann::json(std::uniform_real_distribution<double>(0.0, 15.0)(rng))
                                            : nlohmann::json("text");
        }
    } else if (op == "add_axis" || op == "remove_axis" || op == "remove_point" || op == "apply_to_table") {
        a["vis"] = focus_id && (op == "add_axis" || op == "remove_axis") ? *focus_id
                                                                           : some_artifact(rng, s, coin(rng, 0.95) ? 2 : 1);
        if (op == "add_axis" || op == "apply_to_table") {
            std::string table = some_artifact(rng, s, 1);
            const auto it = s.artifacts.find(a["vis"].get<std::string>());
            if (it != s.artifacts.end()) {
                if (const auto* v = std::get_if<VisArtifact>(&it->second); v && v->origin_table && coin(rng, 0.7)) {
                    table = *v->origin_table;
                }
            }
            a["table"] = table;
            if (op == "add_axis") a["column"] = some_column(rng, s, table);
        }
        if (op == "remove_axis") a["axis"] = static_cast<std::int64_t>(below(rng, 4));
        if (op == "remove_point") a["index"] = static_cast<std::int64_t>(below(rng, 200));
    } else if (op == "delete") {
        a["artifact"] = some_artifact(rng, s, 0);
    } else if (op == "report_answer") {
        a["key"] = pick(rng, std::vector<std::string>{"wine_rows", "k_means", ""});
        a["value"] = static_cast<std::int64_t>(below(rng, 200));
    }
    return c;
}

namespace {

bool hidden_artifact(const WorkspaceState& s, const nlohmann::json& v) {
    if (!v.is_string()) return false;
    const auto id = v.get<std::string>();
    return s.artifacts.contains(id) && !s.artifact_visible(id);
}

// Whether the command names something the user cannot currently see.
bool aims_at_hidden(const WorkspaceState& s, const Command& c) {
    if (s.mode != Mode::Separated) return false;
    for (const char* key : {"artifact", "table", "vis"}) {
        if (c.args.contains(key) && hidden_artifact(s, c.args[key])) return true;
    }
    if (c.args.contains("item") && c.args["item"].is_object() && c.args["item"].contains("artifact") &&
        hidden_artifact(s, c.args["item"]["artifact"])) {
        return true;
    }
    if (!s.cells_visible() && c.args.contains("cell")) return true;
    if (c.args.contains("region") && c.args["region"].is_string()) {
        const auto r = c.args["region"].get<std::string>();
        if (r.starts_with("window:") && !s.cells_visible()) return true;
        if (r.starts_with("artifact:") && hidden_artifact(s, r.substr(9))) return true;
    }
    return false;
}

}  // namespace

void fuzz_engine(Rng& rng, Engine& engine, std::size_t length, FuzzReport& report, std::vector<Command>* issued) {
    std::int64_t clock = engine.state().last_t;
    std::vector<Command> warmup;
    // Run some of the dataset and parameter cells first so later pulls have inputs.
    if (engine.state().cells_visible() && coin(rng, 0.8)) {
        for (const char* id : {"c03", "c13", "c15", "c16", "c17"}) {
            if (engine.state().notebook.find_cell(id) && coin(rng, 0.8)) {
                warmup.push_back(Command{"execute", clock, {{"cell", id}}});
            }
        }
    }
    for (std::size_t step = 0; step < length; ++step) {
        const WorkspaceState before = engine.state();
        const KernelBackend* kernel_before = &engine.kernel();
        const std::size_t log_before = engine.log().size();
        const bool check_digest = below(rng, 8) == 0;
        const std::string digest_before = check_digest ? engine.kernel().digest() : std::string();
        const Command cmd = step < warmup.size() ? warmup[step] : random_command(rng, before, clock);
        if (issued) issued->push_back(cmd);
        ++report.commands;

        auto violation = [&](const std::string& what) {
            report.violations.push_back("step " + std::to_string(step) + " (" + command_to_json(cmd).dump() + "): " + what);
        };

        std::optional<Event> event;
        bool ok = true;
        try {
            event = engine.dispatch(cmd);
        } catch (const Error&) {
            ok = false;
        } catch (const std::exception& e) {
            violation(std::string("non-domain exception: ") + e.what());
            ok = false;
        }
        const WorkspaceState& after = engine.state();

        if (!ok) {
            ++report.rejected;
            if (!(after == before)) violation("rejected command changed the workspace");
            if (engine.log().size() != log_before) violation("rejected command was logged");
            if (&engine.kernel() != kernel_before) violation("rejected command replaced the kernel");
            if (check_digest && engine.kernel().digest() != digest_before) violation("rejected command changed the kernel");
            continue;
        }
        ++report.accepted;
        if (aims_at_hidden(before, cmd)) violation("command aimed at the hidden space succeeded");
        if (engine.log().size() != log_before + (event ? 1 : 0)) violation("log length does not match events");
        if (!event && !(after == before)) violation("silent command changed the workspace");
        for (const auto& v : invariant_violations(after)) violation(v);

        const std::size_t held = static_cast<std::size_t>(after.held[0].has_value()) + after.held[1].has_value();
        if (held > 2) violation("more than two held items");
        if (after.mode != before.mode) violation("mode changed");
        if (before.mode == Mode::Separated) {
            for (const auto& [id, art] : before.artifacts) {
                if (before.artifact_visible(id)) continue;
                const auto it = after.artifacts.find(id);
                if (it == after.artifacts.end() || !(it->second == art) ||
                    after.artifact_space.at(id) != before.artifact_space.at(id)) {
                    violation("hidden artifact " + id + " was touched");
                }
            }
            if (!before.cells_visible() && (!(after.notebook == before.notebook) ||
                                            after.executed_cells != before.executed_cells)) {
                violation("hidden notebook was touched");
            }
        } else if (after.active_space || !after.artifact_space.empty()) {
            violation("unified workspace has spaces");
        }
    }
}

}  // namespace icon::test
