#include "icon/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include "icon/codegen.hpp"
#include "icon/error.hpp"

namespace icon {

std::int64_t dwell_threshold_from_env() {
    const char* raw = std::getenv("ICON_DWELL_MS");
    if (raw == nullptr) return kDefaultDwellMs;
    std::int64_t v = 0;
    const auto* end = raw + std::strlen(raw);
    const auto res = std::from_chars(raw, end, v);
    if (res.ec != std::errc() || res.ptr != end || v < 0) return kDefaultDwellMs;
    return v;
}

std::string state_hash(const WorkspaceState& s, const KernelBackend& kernel) {
    return fnv1a_hex(workspace_to_json(s).dump() + "|" + kernel.digest());
}

namespace {

struct Outcome {
    EventKind kind;
    ojson payload;
};

// Kernel access for one command. Reads go to the live kernel until the first mutation, which
// happens on a private clone that only replaces the live kernel if the command succeeds.
class KernelSlot {
public:
    explicit KernelSlot(const KernelBackend& live) : live_(live) {}

    KernelBackend& mutate() {
        if (!work_) work_ = live_.clone();
        return *work_;
    }
    [[nodiscard]] const KernelBackend& read() const { return work_ ? *work_ : live_; }
    std::unique_ptr<KernelBackend> take() { return std::move(work_); }

private:
    const KernelBackend& live_;
    std::unique_ptr<KernelBackend> work_;
};

const char* kind_name(const Artifact& a) { return std::holds_alternative<TableArtifact>(a) ? "table" : "vis"; }

void require_cells_visible(const WorkspaceState& s) {
    if (!s.cells_visible()) fail(ErrorCode::WrongSpace, "notebook cells are hidden in the artifact space");
}

Cell& visible_cell(WorkspaceState& s, const std::string& id) {
    require_cells_visible(s);
    return s.notebook.cell(id);
}

Artifact& visible_artifact(WorkspaceState& s, const std::string& id) {
    auto it = s.artifacts.find(id);
    if (it == s.artifacts.end()) fail(ErrorCode::UnknownArtifact, "unknown artifact '" + id + "'");
    if (!s.artifact_visible(id)) fail(ErrorCode::WrongSpace, "artifact '" + id + "' is in the other space");
    return it->second;
}

TableArtifact& as_table(Artifact& a) {
    auto* t = std::get_if<TableArtifact>(&a);
    if (!t) fail(ErrorCode::NotTabular, "artifact '" + artifact_id(a) + "' is not a table");
    return *t;
}

VisArtifact& as_vis(Artifact& a) {
    auto* v = std::get_if<VisArtifact>(&a);
    if (!v) fail(ErrorCode::InvalidTarget, "artifact '" + artifact_id(a) + "' is not a visualization");
    return *v;
}

Pose pose_arg(const Command& c, const char* key) {
    Pose p = pose_from_json(c.field(key));
    require_valid_pose(p, key);
    return p;
}

std::size_t index_arg(const Command& c, const char* key) {
    const auto v = c.integer(key);
    if (v < 0) fail(ErrorCode::BadIndex, c.op + ": negative " + key);
    return static_cast<std::size_t>(v);
}

Hand hand_arg(const Command& c) {
    const auto h = hand_from_string(c.str("hand"));
    if (!h) fail(ErrorCode::BadCommand, c.op + ": hand must be L or R");
    return *h;
}

ArtifactId new_artifact_id(WorkspaceState& s) { return "a" + std::to_string(s.next_artifact++); }

void place_new(WorkspaceState& s, Artifact a) {
    const ArtifactId id = artifact_id(a);
    if (s.mode == Mode::Separated) s.artifact_space[id] = *s.active_space;
    if (const auto& origin = artifact_origin_cell(a)) s.links.push_back({*origin, id});
    s.artifacts.emplace(id, std::move(a));
}

// Consumption or deletion: everything that pointed at the artifact lets go of it.
void remove_artifact(WorkspaceState& s, const ArtifactId& id) {
    s.artifacts.erase(id);
    s.artifact_space.erase(id);
    std::erase_if(s.links, [&](const Link& l) { return l.artifact_id == id; });
    for (auto& h : s.held) {
        if (h && h->artifact == id) h.reset();
    }
    if (s.focus == "artifact:" + id) s.focus.reset();
}

std::string describe_display(const DisplayDescriptor& d) {
    std::string axes;
    for (const auto& a : d.axis_names) axes += (axes.empty() ? "" : ", ") + a;
    return std::string(to_string(d.kind)) + ": " + std::to_string(d.point_count) + " points (" + axes + ")";
}

void record_execution(WorkspaceState& s, Cell& cell, const ExecResult& r) {
    cell.outputs.clear();
    if (r.ok) {
        cell.dirty = false;
        if (r.display) cell.outputs.push_back({Output::Kind::Display, describe_display(*r.display)});
        s.executed_cells.insert(cell.id);
    } else {
        cell.outputs.push_back({Output::Kind::Error, r.error});
        s.executed_cells.erase(cell.id);
    }
}

struct Materialized {
    ArtifactId id;
    const char* kind;
    bool executed;
};

// Turns a data or visualization cell into an artifact, running the cell first if its last
// result is stale.
Materialized materialize(WorkspaceState& s, KernelSlot& kernel, const std::string& cell_id, const Pose& pose) {
    Cell& cell = s.notebook.cell(cell_id);
    if (cell.kind != CellKind::Data && cell.kind != CellKind::Visualization) {
        fail(ErrorCode::WrongCellKind, "cell '" + cell.id + "' is a " + std::string(to_string(cell.kind)) +
                                           " cell; only data and visualization cells can be pulled");
    }
    bool executed = false;
    if (!s.executed_cells.contains(cell.id)) {
        const auto r = kernel.mutate().execute(cell.id, cell.source);
        if (!r.ok) fail(ErrorCode::KernelError, "cell '" + cell.id + "' failed: " + r.error);
        record_execution(s, cell, r);
        executed = true;
    }
    const ArtifactId id = new_artifact_id(s);
    if (cell.kind == CellKind::Data) {
        const auto vars = defined_variables(parse_source(cell.source));
        std::shared_ptr<const TableExtract> table;
        for (auto it = vars.rbegin(); it != vars.rend() && !table; ++it) {
            try {
                table = kernel.read().extract_table(*it);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::UnknownVariable && e.code() != ErrorCode::NotTabular) throw;
            }
        }
        if (!table) fail(ErrorCode::NotTabular, "cell '" + cell.id + "' defines no table");
        place_new(s, make_table_artifact(id, std::move(table), cell.id, pose));
        return {id, "table", executed};
    }
    place_new(s, make_vis_artifact(id, *kernel.read().extract_plot(cell.id), cell.id, pose));
    return {id, "vis", executed};
}

ojson holding_to_json(const std::vector<ArtifactId>& ids) { return ojson(ids); }

// Walks through the portal. Held artifacts come along; held columns are let go since their
// table stays behind.
std::vector<ArtifactId> cross_portal(WorkspaceState& s, Space to) {
    std::vector<ArtifactId> holding;
    for (auto& h : s.held) {
        if (!h) continue;
        if (h->column) {
            h.reset();
            continue;
        }
        holding.push_back(h->artifact);
        s.artifact_space[h->artifact] = to;
    }
    s.active_space = to;
    s.focus.reset();
    return holding;
}

void require_region_visible(const WorkspaceState& s, const std::string& region) {
    auto hidden = [&] { fail(ErrorCode::RegionNotVisible, "region '" + region + "' is not visible"); };
    if (region == "desk") return;
    if (region == "portal") {
        if (s.mode != Mode::Separated || s.active_space != Space::Artifact) hidden();
        return;
    }
    if (region.starts_with("window:")) {
        if (!s.notebook.find_window(region.substr(7))) fail(ErrorCode::UnknownRegion, "unknown region '" + region + "'");
        if (!s.cells_visible()) hidden();
        return;
    }
    if (region.starts_with("artifact:")) {
        const auto id = region.substr(9);
        if (!s.artifacts.contains(id)) fail(ErrorCode::UnknownRegion, "unknown region '" + region + "'");
        if (!s.artifact_visible(id)) hidden();
        return;
    }
    fail(ErrorCode::UnknownRegion, "unknown region '" + region + "'");
}

Outcome do_put_in(WorkspaceState& s, const std::string& artifact, const std::string& cell_id) {
    require_cells_visible(s);
    const Artifact& a = visible_artifact(s, artifact);
    const Cell& cell = s.notebook.cell(cell_id);
    CodegenResult r;
    if (cell.kind == CellKind::Empty) {
        r = generate_create(a, s.notebook, cell_id);
    } else if (artifact_origin_cell(a) == cell.id) {
        r = generate_update(a, s.notebook, cell_id);
    } else {
        fail(ErrorCode::InvalidTarget, "cell '" + cell.id + "' is neither empty nor the origin of '" + artifact + "'");
    }
    edit_cell(s.notebook, cell_id, r.new_source);
    s.executed_cells.erase(r.cell_id);
    remove_artifact(s, artifact);
    return {r.mode == CodegenMode::Create ? EventKind::PutInCreate : EventKind::PutInUpdate,
            {{"artifact", artifact}, {"cell", r.cell_id}, {"variable", r.variable}, {"source", r.new_source}}};
}

std::optional<Outcome> run(WorkspaceState& s, KernelSlot& kernel, const Command& c) {
    const std::string& op = c.op;

    if (op == "edit_cell") {
        const auto id = c.str("cell");
        (void)visible_cell(s, id);
        const Cell& cell = edit_cell(s.notebook, id, c.str("source"));
        s.executed_cells.erase(cell.id);
        return Outcome{EventKind::Edit, {{"cell", cell.id}, {"source", cell.source}, {"cell_kind", to_string(cell.kind)}}};
    }
    if (op == "execute") {
        Cell& cell = visible_cell(s, c.str("cell"));
        const auto r = kernel.mutate().execute(cell.id, cell.source);
        record_execution(s, cell, r);
        ojson p{{"cell", cell.id}, {"status", r.ok ? "ok" : "error"}};
        if (!r.ok) p["message"] = r.error;
        p["defined_vars"] = r.defined_vars;
        if (r.display) p["display"] = to_string(r.display->kind);
        return Outcome{EventKind::Execute, std::move(p)};
    }
    if (op == "pull_out") {
        if (s.mode != Mode::Unified) fail(ErrorCode::WrongMode, "pull_out needs the unified workspace");
        const auto cell = c.str("cell");
        const Pose pose = pose_arg(c, "pose");
        const auto m = materialize(s, kernel, cell, pose);
        return Outcome{EventKind::PullOut,
                       {{"cell", cell},
                        {"pose", pose_to_json(pose)},
                        {"artifact", m.id},
                        {"artifact_kind", m.kind},
                        {"executed", m.executed}}};
    }
    if (op == "put_in") {
        return do_put_in(s, c.str("artifact"), c.str("cell"));
    }
    if (op == "drop") {
        const auto id = c.str("artifact");
        const Artifact& a = visible_artifact(s, id);
        const Pose pose = pose_arg(c, "pose");
        if (s.cells_visible()) {
            const std::string* best = nullptr;
            double best_d = kSnapRadius;
            for (const auto* cell : s.notebook.cells()) {
                if (cell->kind != CellKind::Empty && artifact_origin_cell(a) != cell->id) continue;
                const double d = distance(cell_pose(s.notebook, cell->id), pose);
                if (d <= kSnapRadius && (best == nullptr || d < best_d)) {
                    best = &cell->id;
                    best_d = d;
                }
            }
            if (best) return do_put_in(s, id, *best);
        }
        artifact_pose(s.artifacts.at(id)) = pose;
        return Outcome{EventKind::MoveArtifact, {{"artifact", id}, {"pose", pose_to_json(pose)}}};
    }
    if (op == "enter_cell") {
        if (s.mode != Mode::Separated) fail(ErrorCode::WrongMode, "enter_cell needs the separated workspace");
        if (s.active_space != Space::Notebook) fail(ErrorCode::WrongSpace, "already in the artifact space");
        const auto cell = c.str("cell");
        (void)s.notebook.cell(cell);
        const Pose spawn = ahead_of(s.user_pose, kSpawnDistance);
        const auto f = forward(s.user_pose.yaw);
        Pose portal{spawn.x - kPortalBehindSpawn * f[0], s.user_pose.y, spawn.z - kPortalBehindSpawn * f[1],
                    s.user_pose.yaw};
        portal.x = std::clamp(portal.x, -kArenaHalfExtent, kArenaHalfExtent);
        portal.z = std::clamp(portal.z, -kArenaHalfExtent, kArenaHalfExtent);
        s.portal_pose = portal;
        const auto holding = cross_portal(s, Space::Artifact);
        const auto m = materialize(s, kernel, cell, spawn);
        return Outcome{EventKind::PortalCross,
                       {{"direction", "enter"},
                        {"cell", cell},
                        {"artifact", m.id},
                        {"artifact_kind", m.kind},
                        {"executed", m.executed},
                        {"holding", holding_to_json(holding)}}};
    }
    if (op == "exit_portal") {
        if (s.mode != Mode::Separated) fail(ErrorCode::WrongMode, "there is no portal in the unified workspace");
        if (s.active_space != Space::Artifact) fail(ErrorCode::WrongSpace, "already in the notebook space");
        const auto holding = cross_portal(s, Space::Notebook);
        return Outcome{EventKind::PortalCross, {{"direction", "exit"}, {"holding", holding_to_json(holding)}}};
    }
    if (op == "grab") {
        const Hand hand = hand_arg(c);
        const auto& item_json = c.field("item");
        if (!item_json.is_object() || !item_json.contains("artifact") || !item_json["artifact"].is_string()) {
            fail(ErrorCode::BadCommand, "grab: item needs an artifact id");
        }
        HeldItem item{item_json["artifact"].get<std::string>(), std::nullopt};
        Artifact& a = visible_artifact(s, item.artifact);
        if (auto col = item_json.find("column"); col != item_json.end()) {
            if (!col->is_string()) fail(ErrorCode::BadCommand, "grab: column must be a string");
            item.column = col->get<std::string>();
            if (!as_table(a).base->column_index(*item.column)) {
                fail(ErrorCode::UnknownColumn, "unknown column '" + *item.column + "'");
            }
        }
        const auto h = static_cast<std::size_t>(hand);
        if (s.held[h]) fail(ErrorCode::HandOccupied, std::string(to_string(hand)) + " hand is full");
        if (s.held[1 - h] == item) fail(ErrorCode::AlreadyHeld, "the other hand already holds this");
        s.held[h] = item;
        return Outcome{EventKind::Grab, {{"hand", to_string(hand)}, {"item", held_item_to_json(item)}}};
    }
    if (op == "release") {
        const Hand hand = hand_arg(c);
        auto& slot = s.held[static_cast<std::size_t>(hand)];
        if (!slot) fail(ErrorCode::HandEmpty, std::string(to_string(hand)) + " hand is empty");
        ojson item = held_item_to_json(*slot);
        slot.reset();
        return Outcome{EventKind::Release, {{"hand", to_string(hand)}, {"item", std::move(item)}}};
    }
    if (op == "set_focus") {
        const auto region = c.str("region");
        const auto dwell = c.integer("dwell_ms");
        if (dwell < 0) fail(ErrorCode::BadCommand, "set_focus: negative dwell");
        require_region_visible(s, region);
        if (s.focus == region || dwell < s.dwell_threshold_ms) return std::nullopt;
        ojson from = s.focus ? ojson(*s.focus) : ojson(nullptr);
        s.focus = region;
        return Outcome{EventKind::FocusChange, {{"region", region}, {"dwell_ms", dwell}, {"from", std::move(from)}}};
    }
    if (op == "move_user") {
        s.user_pose = pose_arg(c, "pose");
        return Outcome{EventKind::MoveUser, {{"pose", pose_to_json(s.user_pose)}}};
    }
    if (op == "move_artifact") {
        const auto id = c.str("artifact");
        Artifact& a = visible_artifact(s, id);
        artifact_pose(a) = pose_arg(c, "pose");
        return Outcome{EventKind::MoveArtifact, {{"artifact", id}, {"pose", pose_to_json(artifact_pose(a))}}};
    }
    if (op == "sort_table") {
        const auto id = c.str("table");
        auto& t = as_table(visible_artifact(s, id));
        const auto dir = sort_direction_from_string(c.str("direction"));
        if (!dir) fail(ErrorCode::BadCommand, "sort_table: direction must be asc or desc");
        const auto column = c.str("column");
        t = sort_table(std::move(t), column, *dir);
        return Outcome{EventKind::Sort, {{"table", id}, {"column", column}, {"direction", to_string(*dir)}}};
    }
    if (op == "filter_rows") {
        const auto id = c.str("table");
        auto& t = as_table(visible_artifact(s, id));
        const auto cmp = comparator_from_string(c.str("comparator"));
        if (!cmp) fail(ErrorCode::BadCommand, "filter_rows: unknown comparator");
        const auto& th = c.field("threshold");
        if (!th.is_number() && !th.is_string()) fail(ErrorCode::BadCommand, "filter_rows: threshold must be a scalar");
        const Value threshold = value_from_json(th);
        const auto column = c.str("column");
        t = filter_rows(std::move(t), column, *cmp, threshold);
        return Outcome{EventKind::Filter,
                       {{"table", id}, {"column", column}, {"comparator", to_string(*cmp)}, {"threshold", value_to_json(threshold)}}};
    }
    if (op == "remove_filter") {
        const auto id = c.str("table");
        auto& t = as_table(visible_artifact(s, id));
        const auto index = index_arg(c, "index");
        t = remove_filter(std::move(t), index);
        return Outcome{EventKind::RemoveFilter, {{"table", id}, {"index", index}}};
    }
    if (op == "select_column") {
        const auto id = c.str("table");
        auto& t = as_table(visible_artifact(s, id));
        const auto column = c.str("column");
        t = select_column(std::move(t), column);
        return Outcome{EventKind::SelectColumn,
                       {{"table", id}, {"column", column}, {"selected", t.selected_columns.contains(column)}}};
    }
    if (op == "merge_columns") {
        const auto id = c.str("table");
        auto& t = as_table(visible_artifact(s, id));
        const auto& cols = c.field("columns");
        if (!cols.is_array() || cols.size() != 2 || !cols[0].is_string() || !cols[1].is_string()) {
            fail(ErrorCode::BadCommand, "merge_columns: columns must be two names");
        }
        const Pose pose = pose_arg(c, "pose");
        const auto a = cols[0].get<std::string>();
        const auto b = cols[1].get<std::string>();
        const auto vis_id = new_artifact_id(s);
        auto [table, vis] = merge_columns_to_vis(t, a, b, vis_id, pose);
        t = std::move(table);
        place_new(s, std::move(vis));
        return Outcome{EventKind::MergeVis,
                       {{"table", id}, {"columns", {a, b}}, {"pose", pose_to_json(pose)}, {"artifact", vis_id}}};
    }
    if (op == "add_axis") {
        const auto vid = c.str("vis");
        const auto tid = c.str("table");
        auto& v = as_vis(visible_artifact(s, vid));
        const auto& t = as_table(visible_artifact(s, tid));
        const auto column = c.str("column");
        v = add_axis(std::move(v), t, column);
        return Outcome{EventKind::AddAxis, {{"vis", vid}, {"table", tid}, {"column", column}}};
    }
    if (op == "remove_axis") {
        const auto vid = c.str("vis");
        auto& v = as_vis(visible_artifact(s, vid));
        const auto axis = index_arg(c, "axis");
        v = remove_axis(std::move(v), axis);
        return Outcome{EventKind::RemoveAxis, {{"vis", vid}, {"axis", axis}}};
    }
    if (op == "remove_point") {
        const auto vid = c.str("vis");
        auto& v = as_vis(visible_artifact(s, vid));
        const auto index = index_arg(c, "index");
        v = remove_point(std::move(v), index);
        return Outcome{EventKind::RemovePoint, {{"vis", vid}, {"index", index}}};
    }
    if (op == "apply_to_table") {
        const auto vid = c.str("vis");
        const auto tid = c.str("table");
        auto& v = as_vis(visible_artifact(s, vid));
        auto& t = as_table(visible_artifact(s, tid));
        const auto before = t.excluded_rows.size();
        auto [vis, table] = apply_vis_to_table(v, t);
        v = std::move(vis);
        t = std::move(table);
        return Outcome{EventKind::ApplyToTable,
                       {{"vis", vid}, {"table", tid}, {"removed_rows", t.excluded_rows.size() - before}}};
    }
    if (op == "delete") {
        const auto id = c.str("artifact");
        const char* kind = kind_name(visible_artifact(s, id));
        remove_artifact(s, id);
        return Outcome{EventKind::Delete, {{"artifact", id}, {"artifact_kind", kind}}};
    }
    if (op == "report_answer") {
        const auto key = c.str("key");
        if (key.empty()) fail(ErrorCode::BadCommand, "report_answer: empty key");
        ojson value = c.field("value");
        s.answers.push_back({key, value});
        return Outcome{EventKind::AnswerReported, {{"key", key}, {"value", std::move(value)}}};
    }
    if (op == "complete") {
        return Outcome{EventKind::TaskComplete, ojson::object()};
    }
    fail(ErrorCode::BadCommand, "unknown command '" + op + "'");
}

}  // namespace

Engine::Engine(Notebook nb, EngineConfig config, std::unique_ptr<KernelBackend> kernel)
    : state_(initial_workspace(std::move(nb), config.mode, config.dwell_ms)),
      kernel_(kernel ? std::move(kernel) : std::make_unique<MockKernel>()) {
    state_.notebook.validate();
    log_.push_back({0,
                    EventKind::SessionStart,
                    {{"mode", to_string(config.mode)}, {"dwell_ms", config.dwell_ms}, {"notebook", state_.notebook.id}}});
}

Engine::Engine(WorkspaceState state, std::unique_ptr<KernelBackend> kernel, std::vector<Event> log)
    : state_(std::move(state)),
      kernel_(kernel ? std::move(kernel) : std::make_unique<MockKernel>()),
      log_(std::move(log)) {}

std::optional<Event> Engine::dispatch(const Command& cmd) {
    if (cmd.t < state_.last_t) {
        fail(ErrorCode::NonMonotonicTime,
             "command at t=" + std::to_string(cmd.t) + " precedes t=" + std::to_string(state_.last_t));
    }
    WorkspaceState next = state_;
    KernelSlot kernel(*kernel_);
    auto outcome = run(next, kernel, cmd);
    if (!outcome) return std::nullopt;
    next.last_t = cmd.t;
    if (auto k = kernel.take()) kernel_ = std::move(k);
    state_ = std::move(next);
    log_.push_back({cmd.t, outcome->kind, std::move(outcome->payload)});
    return log_.back();
}

std::string Engine::state_hash() const { return icon::state_hash(state_, *kernel_); }

Command command_for_event(const Event& e) {
    Command c;
    c.t = e.t;
    c.args = nlohmann::json(e.payload);
    switch (e.kind) {
        case EventKind::SessionStart: throw SchemaError("event", 0, "SessionStart is not a command");
        case EventKind::PullOut: c.op = "pull_out"; break;
        case EventKind::PutInCreate:
        case EventKind::PutInUpdate: c.op = "put_in"; break;
        case EventKind::MergeVis: c.op = "merge_columns"; break;
        case EventKind::AddAxis: c.op = "add_axis"; break;
        case EventKind::RemoveAxis: c.op = "remove_axis"; break;
        case EventKind::RemovePoint: c.op = "remove_point"; break;
        case EventKind::ApplyToTable: c.op = "apply_to_table"; break;
        case EventKind::Sort: c.op = "sort_table"; break;
        case EventKind::Filter: c.op = "filter_rows"; break;
        case EventKind::RemoveFilter: c.op = "remove_filter"; break;
        case EventKind::SelectColumn: c.op = "select_column"; break;
        case EventKind::PortalCross: {
            const auto dir = e.payload.value("direction", std::string());
            if (dir == "enter") c.op = "enter_cell";
            else if (dir == "exit") c.op = "exit_portal";
            else throw SchemaError("event.direction", 0, "expected enter or exit");
            break;
        }
        case EventKind::FocusChange: c.op = "set_focus"; break;
        case EventKind::Grab: c.op = "grab"; break;
        case EventKind::Release: c.op = "release"; break;
        case EventKind::MoveArtifact: c.op = "move_artifact"; break;
        case EventKind::MoveUser: c.op = "move_user"; break;
        case EventKind::Delete: c.op = "delete"; break;
        case EventKind::Edit: c.op = "edit_cell"; break;
        case EventKind::Execute: c.op = "execute"; break;
        case EventKind::AnswerReported: c.op = "report_answer"; break;
        case EventKind::TaskComplete: c.op = "complete"; break;
    }
    return c;
}

}  // namespace icon
