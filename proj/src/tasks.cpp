#include "icon/tasks.hpp"

#include <cmath>
#include <functional>

#include "icon/cluster.hpp"
#include "icon/datasets.hpp"
#include "icon/error.hpp"

namespace icon {

namespace {

constexpr std::int64_t kGlance = 1500;
constexpr std::int64_t kGesture = 4000;
constexpr std::int64_t kDwell = 800;

// Cells of the study fixture the scripts work on.
constexpr const char* kWineCell = "c03";
constexpr const char* kNoteCell = "c06";
constexpr const char* kScatterCell = "c07";
constexpr const char* kSyncCell = "c08";
constexpr const char* kIrisCell = "c13";
constexpr const char* kKMeansParam = "c15";
constexpr const char* kKnnParam = "c16";
constexpr const char* kLabelsCell = "c17";
constexpr const char* kGraphCell = "c19";

nlohmann::json pose_json(const Pose& p) { return nlohmann::json(pose_to_json(p)); }

// Where a participant standing at the center would put an artifact taken from this cell.
Pose desk_pose(const Notebook& nb, std::string_view cell) {
    Pose p = cell_pose(nb, cell);
    p.x *= 0.6;
    p.z *= 0.6;
    return p;
}

class Script {
public:
    Script(const Notebook& nb, Mode mode) : engine_(nb, EngineConfig{mode, kDefaultDwellMs}), mode_(mode) {}

    Engine& engine() { return engine_; }
    const WorkspaceState& state() const { return engine_.state(); }
    Mode mode() const { return mode_; }

    std::optional<Event> step(const std::string& what, std::int64_t advance, const std::string& op,
                              nlohmann::json args = nlohmann::json::object()) {
        ++step_;
        clock_ += advance;
        try {
            return engine_.dispatch(Command{op, clock_, std::move(args)});
        } catch (const Error& e) {
            fail(ErrorCode::ScriptStepFailed,
                 "step " + std::to_string(step_) + " (" + what + "): " + std::string(to_string(e.code())) + ": " + e.what());
        }
    }

    Event must(const std::string& what, std::int64_t advance, const std::string& op,
               nlohmann::json args = nlohmann::json::object()) {
        auto e = step(what, advance, op, std::move(args));
        if (!e) check(false, what, "no event");
        return *e;
    }

    void check(bool ok, const std::string& what, const std::string& detail) const {
        if (!ok) fail(ErrorCode::ScriptStepFailed, "step " + std::to_string(step_) + " (" + what + "): " + detail);
    }

    void look_at_cell(const std::string& cell) {
        if (!state().cells_visible()) return;
        const auto& nb = state().notebook;
        const std::string region = "window:" + nb.windows[nb.locate(cell).window].id;
        (void)step("look at " + cell, kGlance, "set_focus", {{"region", region}, {"dwell_ms", kDwell}});
    }

    // Brings the cell's artifact into reach: pulled out in place, or spawned behind the portal.
    std::string open_cell(const std::string& cell) {
        look_at_cell(cell);
        const Event e = mode_ == Mode::Unified
                            ? must("pull out " + cell, kGesture, "pull_out",
                                   {{"cell", cell}, {"pose", pose_json(desk_pose(state().notebook, cell))}})
                            : must("enter " + cell, kGesture, "enter_cell", {{"cell", cell}});
        return e.payload.at("artifact").get<std::string>();
    }

    void leave_artifact_space() {
        if (mode_ == Mode::Separated && state().active_space == Space::Artifact) {
            (void)must("walk back through the portal", kGesture, "exit_portal");
        }
    }

    void report(const std::string& key, nlohmann::json value) {
        (void)must("report " + key, kGlance, "report_answer", {{"key", key}, {"value", std::move(value)}});
    }

    const TableArtifact& table(const std::string& id) const { return std::get<TableArtifact>(state().artifact(id)); }
    const VisArtifact& vis(const std::string& id) const { return std::get<VisArtifact>(state().artifact(id)); }

private:
    Engine engine_;
    Mode mode_;
    std::int64_t clock_ = 0;
    int step_ = 0;
};

double first_displayed(const TableArtifact& t, const std::string& column) {
    const auto idx = *t.base->column_index(column);
    const auto ids = t.displayed_row_ids();
    if (ids.empty()) fail(ErrorCode::ScriptStepFailed, "table shows no rows");
    return std::get<double>(t.base->rows[ids.front()][idx]);
}

void instructed(Script& s) {
    const std::string table = s.open_cell(kWineCell);
    {
        const auto shown = s.table(table).displayed();
        s.report("wine_rows", shown.row_count());
        s.report("wine_cols", shown.columns.size());
    }
    (void)s.must("sort ascending", kGesture, "sort_table", {{"table", table}, {"column", "alcohol"}, {"direction", "asc"}});
    s.report("alcohol_min", first_displayed(s.table(table), "alcohol"));
    (void)s.must("sort descending", kGesture, "sort_table",
                 {{"table", table}, {"column", "alcohol"}, {"direction", "desc"}});
    s.report("alcohol_max", first_displayed(s.table(table), "alcohol"));

    s.leave_artifact_space();
    s.look_at_cell(kNoteCell);
    (void)s.must("note the shape", kGesture, "edit_cell",
                 {{"cell", kNoteCell}, {"source", "# wine: 178 rows x 13 columns; alcohol spans 11.03..14.83"}});

    // The scatter cell reads the wine variable, which the pull above already computed.
    const std::string vis = s.open_cell(kScatterCell);
    (void)s.must("add a third axis", kGesture, "add_axis", {{"vis", vis}, {"table", table}, {"column", "color_intensity"}});
    const PlotExtract three_d = s.vis(vis).extract;
    s.check(three_d.kind == PlotKind::Scatter3D, "add a third axis", "plot is not 3D");

    if (s.mode() == Mode::Separated) {
        (void)s.must("pick up the plot", kGlance, "grab", {{"hand", "R"}, {"item", {{"artifact", vis}}}});
        s.leave_artifact_space();
    }
    s.look_at_cell(kSyncCell);
    const Event put = s.must("drop the plot into the empty cell", kGesture, "drop",
                             {{"artifact", vis}, {"pose", pose_json(cell_pose(s.state().notebook, kSyncCell))}});
    s.check(put.kind == EventKind::PutInCreate, "drop the plot into the empty cell", "drop did not sync into the cell");
    (void)s.must("run the synced cell", kGesture, "execute", {{"cell", kSyncCell}});
    s.check(s.state().notebook.cell(kSyncCell).kind == CellKind::Visualization, "run the synced cell",
            "synced cell is not a visualization");
    s.check(identical(*s.engine().kernel().extract_plot(kSyncCell), three_d), "run the synced cell",
            "re-executed cell does not reproduce the 3D plot");
}

std::string param_source(const Notebook& nb, std::string_view cell, std::int64_t value) {
    const auto ast = parse_source(nb.cell(cell).source);
    for (const auto& st : ast.statements) {
        if (const auto* p = std::get_if<ParamDecl>(&st)) {
            ParamDecl next = *p;
            next.value = static_cast<double>(value);
            return render(Statement{next});
        }
    }
    fail(ErrorCode::ScriptStepFailed, "cell '" + std::string(cell) + "' declares no parameter");
}

void set_param(Script& s, const char* cell, std::int64_t value) {
    s.look_at_cell(cell);
    const auto src = param_source(s.state().notebook, cell, value);
    (void)s.must(std::string("set ") + cell, kGesture, "edit_cell", {{"cell", cell}, {"source", src}});
    (void)s.must(std::string("run ") + cell, kGlance, "execute", {{"cell", cell}});
}

void run_cell(Script& s, const char* cell) {
    const auto e = s.must(std::string("run ") + cell, kGlance, "execute", {{"cell", cell}});
    s.check(e.payload.at("status") == "ok", std::string("run ") + cell, e.payload.value("message", std::string()));
}

void exploratory(Script& s, TaskRun& run) {
    const std::string table = s.open_cell(kIrisCell);
    const std::string column = "sepal width (cm)";
    (void)s.must("drop small sepal widths", kGesture, "filter_rows",
                 {{"table", table}, {"column", column}, {"comparator", ">="}, {"threshold", kSepalWidthLow}});
    (void)s.must("drop large sepal widths", kGesture, "filter_rows",
                 {{"table", table}, {"column", column}, {"comparator", "<="}, {"threshold", kSepalWidthHigh}});
    const auto& t = s.table(table);
    s.report("outliers_removed", t.base->row_count() - t.displayed().row_count());

    if (s.mode() == Mode::Separated) {
        (void)s.must("pick up the table", kGlance, "grab", {{"hand", "L"}, {"item", {{"artifact", table}}}});
        s.leave_artifact_space();
    }
    s.look_at_cell(kIrisCell);
    const Event put = s.must("put the cleaned table back", kGesture, "put_in", {{"artifact", table}, {"cell", kIrisCell}});
    s.check(put.kind == EventKind::PutInUpdate, "put the cleaned table back", "origin cell was not updated");
    run_cell(s, kIrisCell);

    const auto [km_lo, km_hi] = declared_range(s.state().notebook, kKMeansParam);
    const auto [kn_lo, kn_hi] = declared_range(s.state().notebook, kKnnParam);
    std::optional<std::tuple<double, std::int64_t, std::int64_t>> best;
    for (std::int64_t km = km_lo; km <= km_hi; ++km) {
        set_param(s, kKMeansParam, km);
        run_cell(s, kLabelsCell);
        for (std::int64_t kn = kn_lo; kn <= kn_hi; ++kn) {
            set_param(s, kKnnParam, kn);
            run_cell(s, kGraphCell);
            const std::string graph = s.open_cell(kGraphCell);
            const auto& plot = s.vis(graph).extract;
            const double score = directed_modularity(plot.edges, plot.colors);
            run.sweep.emplace_back(km, kn, score);
            if (!best || score > std::get<0>(*best)) best = std::tuple{score, km, kn};
            (void)s.must("discard the graph", kGlance, "delete", {{"artifact", graph}});
            s.leave_artifact_space();
        }
    }
    s.check(best.has_value(), "choose parameters", "empty sweep");
    const auto [score, km, kn] = *best;
    set_param(s, kKMeansParam, km);
    set_param(s, kKnnParam, kn);
    run_cell(s, kLabelsCell);
    run_cell(s, kGraphCell);
    s.report("k_means", km);
    s.report("k_nn", kn);
}

}  // namespace

std::pair<std::int64_t, std::int64_t> declared_range(const Notebook& nb, std::string_view cell_id) {
    for (const auto& st : parse_source(nb.cell(cell_id).source).statements) {
        if (const auto* p = std::get_if<ParamDecl>(&st); p && p->range) {
            return {static_cast<std::int64_t>(std::ceil(p->range->first)),
                    static_cast<std::int64_t>(std::floor(p->range->second))};
        }
    }
    fail(ErrorCode::ScriptStepFailed, "cell '" + std::string(cell_id) + "' declares no parameter range");
}

nlohmann::json task_ground_truth(TaskKind task, const Notebook& nb) {
    if (task == TaskKind::Instructed) {
        const auto wine = builtin_dataset("wine");
        const auto alcohol = wine->numeric_column("alcohol");
        return {{"wine_rows", wine->row_count()},
                {"wine_cols", wine->columns.size()},
                {"alcohol_min", *std::min_element(alcohol.begin(), alcohol.end())},
                {"alcohol_max", *std::max_element(alcohol.begin(), alcohol.end())}};
    }
    const auto iris = builtin_dataset("iris");
    const auto width = *iris->column_index("sepal width (cm)");
    std::vector<Point> all;
    std::vector<Point> graph;
    for (const auto& row : iris->rows) {
        const double w = std::get<double>(row[width]);
        if (w < kSepalWidthLow || w > kSepalWidthHigh) continue;
        Point p;
        for (const auto& v : row) p.push_back(std::get<double>(v));
        graph.push_back({p[0], p[1], p[2]});
        all.push_back(std::move(p));
    }
    const auto [km_lo, km_hi] = declared_range(nb, kKMeansParam);
    const auto [kn_lo, kn_hi] = declared_range(nb, kKnnParam);
    double best = -INFINITY;
    std::int64_t best_km = 0, best_kn = 0;
    for (std::int64_t km = km_lo; km <= km_hi; ++km) {
        const auto labels = kmeans(all, km, kKernelKMeansIterations);
        for (std::int64_t kn = kn_lo; kn <= kn_hi; ++kn) {
            const double q = directed_modularity(knn_graph(graph, kn), labels);
            if (q > best) {
                best = q;
                best_km = km;
                best_kn = kn;
            }
        }
    }
    return {{"outliers_removed", iris->row_count() - all.size()}, {"k_means", best_km}, {"k_nn", best_kn}};
}

TaskRun run_task(TaskKind task, Mode mode, const Notebook& nb) {
    Script s(nb, mode);
    TaskRun run;
    if (task == TaskKind::Instructed) instructed(s);
    else exploratory(s, run);
    (void)s.must("finish", kGlance, "complete");
    run.log = s.engine().log();
    run.ground_truth = task_ground_truth(task, nb);
    run.metrics = compute_metrics(run.log, run.ground_truth);
    run.final_state = s.state();
    run.state_hash = s.engine().state_hash();
    return run;
}

std::string_view to_string(TaskKind t) noexcept { return t == TaskKind::Instructed ? "instructed" : "exploratory"; }

std::optional<TaskKind> task_kind_from_string(std::string_view s) noexcept {
    if (s == "instructed") return TaskKind::Instructed;
    if (s == "exploratory") return TaskKind::Exploratory;
    return std::nullopt;
}

}  // namespace icon
