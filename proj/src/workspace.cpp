#include "icon/workspace.hpp"

#include <algorithm>
#include <tuple>

#include "icon/error.hpp"

namespace icon {

bool WorkspaceState::cells_visible() const noexcept {
    return mode == Mode::Unified || active_space == Space::Notebook;
}

bool WorkspaceState::is_held(const ArtifactId& id) const noexcept {
    return std::any_of(held.begin(), held.end(), [&](const auto& h) { return h && h->artifact == id && !h->column; });
}

bool WorkspaceState::artifact_visible(const ArtifactId& id) const {
    if (!artifacts.contains(id)) return false;
    if (mode == Mode::Unified || is_held(id)) return true;
    auto it = artifact_space.find(id);
    return it != artifact_space.end() && it->second == active_space;
}

const Artifact& WorkspaceState::artifact(std::string_view id) const {
    auto it = artifacts.find(std::string(id));
    if (it == artifacts.end()) fail(ErrorCode::UnknownArtifact, "unknown artifact '" + std::string(id) + "'");
    return it->second;
}

WorkspaceState initial_workspace(Notebook nb, Mode mode, std::int64_t dwell_ms) {
    WorkspaceState s;
    s.mode = mode;
    if (mode == Mode::Separated) s.active_space = Space::Notebook;
    s.notebook = std::move(nb);
    s.dwell_threshold_ms = dwell_ms;
    return s;
}

std::vector<std::string> invariant_violations(const WorkspaceState& s) {
    std::vector<std::string> out;
    if (s.mode == Mode::Unified) {
        if (s.active_space) out.push_back("unified workspace has an active space");
        if (!s.artifact_space.empty()) out.push_back("unified workspace assigns artifacts to spaces");
        if (s.portal_pose) out.push_back("unified workspace has a portal");
    } else {
        if (!s.active_space) out.push_back("separated workspace has no active space");
        for (const auto& [id, a] : s.artifacts) {
            if (!s.artifact_space.contains(id)) out.push_back("artifact " + id + " lives in no space");
        }
        for (const auto& [id, sp] : s.artifact_space) {
            if (!s.artifacts.contains(id)) out.push_back("space entry for missing artifact " + id);
        }
    }

    std::vector<Link> expected;
    for (const auto& [id, a] : s.artifacts) {
        const auto& origin = artifact_origin_cell(a);
        if (artifact_id(a) != id) out.push_back("artifact keyed " + id + " carries id " + artifact_id(a));
        if (origin) {
            expected.push_back({*origin, id});
            if (!s.notebook.find_cell(*origin)) out.push_back("artifact " + id + " tethered to missing cell");
        }
    }
    auto links = s.links;
    auto by_pair = [](const Link& a, const Link& b) {
        return std::tie(a.artifact_id, a.cell_id) < std::tie(b.artifact_id, b.cell_id);
    };
    std::sort(links.begin(), links.end(), by_pair);
    std::sort(expected.begin(), expected.end(), by_pair);
    if (links != expected) out.push_back("links do not match pulled artifacts");

    for (std::size_t h = 0; h < s.held.size(); ++h) {
        const auto& item = s.held[h];
        if (!item) continue;
        auto it = s.artifacts.find(item->artifact);
        if (it == s.artifacts.end()) {
            out.push_back("hand holds missing artifact " + item->artifact);
            continue;
        }
        if (item->column) {
            const auto* t = std::get_if<TableArtifact>(&it->second);
            if (!t || !t->base->column_index(*item->column)) out.push_back("hand holds a missing column");
        }
    }
    if (s.held[0] && s.held[1] && *s.held[0] == *s.held[1]) out.push_back("both hands hold the same item");

    for (const auto& [id, a] : s.artifacts) {
        if (const auto* v = std::get_if<VisArtifact>(&a)) {
            try {
                v->extract.validate();
            } catch (const Error& e) {
                out.push_back("vis " + id + ": " + e.what());
            }
            if (v->row_ids.size() != v->extract.points.size()) out.push_back("vis " + id + " row ids misaligned");
            // The source table may be gone already; ids are never reused so the tether is inert.
            if (v->origin_table) {
                auto t = s.artifacts.find(*v->origin_table);
                if (t != s.artifacts.end() && !std::holds_alternative<TableArtifact>(t->second)) {
                    out.push_back("vis " + id + " tethered to a non-table");
                }
            }
        } else {
            const auto& t = std::get<TableArtifact>(a);
            if (!t.base) {
                out.push_back("table " + id + " has no data");
                continue;
            }
            for (const auto& c : t.selected_columns) {
                if (!t.base->column_index(c)) out.push_back("table " + id + " selects missing column " + c);
            }
        }
    }

    for (const auto* cell : s.notebook.cells()) {
        if (cell->kind != classify_cell(cell->source)) out.push_back("cell " + cell->id + " kind is stale");
    }
    for (const auto& id : s.executed_cells) {
        const auto* cell = s.notebook.find_cell(id);
        if (!cell) out.push_back("executed set names missing cell " + id);
        else if (cell->dirty) out.push_back("cell " + id + " is both dirty and executed");
    }

    if (s.focus && s.focus->starts_with("artifact:") && !s.artifacts.contains(s.focus->substr(9))) {
        out.push_back("focus on a missing artifact");
    }
    return out;
}

namespace {

ojson opt_string(const std::optional<std::string>& s) { return s ? ojson(*s) : ojson(nullptr); }

std::optional<std::string> opt_string_from(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

ojson held_item_to_json(const HeldItem& h) {
    ojson j{{"artifact", h.artifact}};
    if (h.column) j["column"] = *h.column;
    return j;
}

ojson artifact_to_json(const Artifact& a) {
    if (const auto* t = std::get_if<TableArtifact>(&a)) {
        ojson filters = ojson::array();
        for (const auto& f : t->filters) {
            filters.push_back({{"column", f.column}, {"op", to_string(f.op)}, {"threshold", value_to_json(f.threshold)}});
        }
        ojson sort = nullptr;
        if (t->sort) sort = {{"column", t->sort->column}, {"direction", to_string(t->sort->direction)}};
        return {{"id", t->id},
                {"type", "table"},
                {"origin_cell", opt_string(t->origin_cell)},
                {"pose", pose_to_json(t->pose)},
                {"base", table_to_json(*t->base)},
                {"sort", std::move(sort)},
                {"filters", std::move(filters)},
                {"selected_columns", t->selected_columns},
                {"vis_columns", t->vis_columns},
                {"excluded_rows", t->excluded_rows}};
    }
    const auto& v = std::get<VisArtifact>(a);
    return {{"id", v.id},
            {"type", "vis"},
            {"origin_cell", opt_string(v.origin_cell)},
            {"origin_table", opt_string(v.origin_table)},
            {"pose", pose_to_json(v.pose)},
            {"plot", plot_to_json(v.extract)},
            {"row_ids", v.row_ids},
            {"source_row_ids", v.source_row_ids}};
}

Artifact artifact_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "table") {
        TableArtifact t;
        t.id = j.at("id").get<std::string>();
        t.origin_cell = opt_string_from(j, "origin_cell");
        t.pose = pose_from_json(j.at("pose"));
        auto base = std::make_shared<TableExtract>(table_from_json(j.at("base")));
        if (const auto& s = j.at("sort"); !s.is_null()) {
            const auto dir = sort_direction_from_string(s.at("direction").get<std::string>());
            if (!dir) fail(ErrorCode::SchemaError, "bad sort direction");
            t.sort = SortState{s.at("column").get<std::string>(), *dir};
        }
        for (const auto& f : j.at("filters")) {
            RowFilter rf;
            rf.column = f.at("column").get<std::string>();
            const auto op = comparator_from_string(f.at("op").get<std::string>());
            if (!op) fail(ErrorCode::SchemaError, "bad filter comparator");
            rf.op = *op;
            const auto col = base->column_index(rf.column);
            if (!col) fail(ErrorCode::SchemaError, "filter on missing column '" + rf.column + "'");
            rf.threshold = base->columns[*col].dtype == Dtype::Number ? Value(number_from_json(f.at("threshold")))
                                                                       : value_from_json(f.at("threshold"));
            t.filters.push_back(std::move(rf));
        }
        t.selected_columns = j.at("selected_columns").get<std::set<std::string>>();
        t.vis_columns = j.at("vis_columns").get<std::set<std::string>>();
        t.excluded_rows = j.at("excluded_rows").get<std::set<std::size_t>>();
        for (auto r : t.excluded_rows) {
            if (r >= base->row_count()) fail(ErrorCode::SchemaError, "excluded row out of range");
        }
        t.base = std::move(base);
        return t;
    }
    if (type == "vis") {
        VisArtifact v;
        v.id = j.at("id").get<std::string>();
        v.origin_cell = opt_string_from(j, "origin_cell");
        v.origin_table = opt_string_from(j, "origin_table");
        v.pose = pose_from_json(j.at("pose"));
        v.extract = plot_from_json(j.at("plot"));
        v.row_ids = j.at("row_ids").get<std::vector<std::size_t>>();
        v.source_row_ids = j.at("source_row_ids").get<std::vector<std::size_t>>();
        return v;
    }
    fail(ErrorCode::SchemaError, "unknown artifact type '" + type + "'");
}

ojson workspace_to_json(const WorkspaceState& s) {
    ojson artifacts = ojson::array();
    for (const auto& [id, a] : s.artifacts) {
        auto j = artifact_to_json(a);
        if (auto it = s.artifact_space.find(id); it != s.artifact_space.end()) j["space"] = to_string(it->second);
        artifacts.push_back(std::move(j));
    }
    ojson links = ojson::array();
    for (const auto& l : s.links) links.push_back({{"cell", l.cell_id}, {"artifact", l.artifact_id}});
    ojson held = ojson::object();
    for (std::size_t h = 0; h < s.held.size(); ++h) {
        held[std::string(to_string(static_cast<Hand>(h)))] = s.held[h] ? held_item_to_json(*s.held[h]) : ojson(nullptr);
    }
    ojson answers = ojson::array();
    for (const auto& a : s.answers) answers.push_back({{"key", a.key}, {"value", a.value}});
    return {{"mode", to_string(s.mode)},
            {"active_space", s.active_space ? ojson(to_string(*s.active_space)) : ojson(nullptr)},
            {"notebook", notebook_state_to_json(s.notebook)},
            {"artifacts", std::move(artifacts)},
            {"links", std::move(links)},
            {"held", std::move(held)},
            {"focus", opt_string(s.focus)},
            {"user_pose", pose_to_json(s.user_pose)},
            {"portal_pose", s.portal_pose ? pose_to_json(*s.portal_pose) : ojson(nullptr)},
            {"executed_cells", s.executed_cells},
            {"answers", std::move(answers)},
            {"last_t", s.last_t},
            {"next_artifact", s.next_artifact},
            {"dwell_threshold_ms", s.dwell_threshold_ms}};
}

WorkspaceState workspace_from_json(const nlohmann::json& j, const std::string& origin) {
    WorkspaceState s;
    std::string where = "workspace";
    try {
        where = "mode";
        const auto mode = mode_from_string(j.at("mode").get<std::string>());
        if (!mode) throw SchemaError(origin, 0, "unknown mode");
        s.mode = *mode;
        where = "active_space";
        if (const auto& sp = j.at("active_space"); !sp.is_null()) {
            s.active_space = space_from_string(sp.get<std::string>());
            if (!s.active_space) throw SchemaError(origin, 0, "unknown space");
        }
        where = "notebook";
        s.notebook = notebook_from_json(j.at("notebook"), origin);
        where = "artifacts";
        for (const auto& aj : j.at("artifacts")) {
            Artifact a = artifact_from_json(aj);
            const auto id = artifact_id(a);
            if (auto it = aj.find("space"); it != aj.end()) {
                const auto sp = space_from_string(it->get<std::string>());
                if (!sp) throw SchemaError(origin, 0, "unknown space for artifact " + id);
                s.artifact_space[id] = *sp;
            }
            if (!s.artifacts.emplace(id, std::move(a)).second) {
                throw SchemaError(origin, 0, "duplicate artifact id " + id);
            }
        }
        where = "links";
        for (const auto& l : j.at("links")) {
            s.links.push_back({l.at("cell").get<std::string>(), l.at("artifact").get<std::string>()});
        }
        where = "held";
        for (std::size_t h = 0; h < s.held.size(); ++h) {
            const auto& item = j.at("held").at(std::string(to_string(static_cast<Hand>(h))));
            if (item.is_null()) continue;
            s.held[h] = HeldItem{item.at("artifact").get<std::string>(), opt_string_from(item, "column")};
        }
        where = "focus";
        s.focus = opt_string_from(j, "focus");
        s.user_pose = pose_from_json(j.at("user_pose"));
        if (const auto& p = j.at("portal_pose"); !p.is_null()) s.portal_pose = pose_from_json(p);
        s.executed_cells = j.at("executed_cells").get<std::set<std::string>>();
        where = "answers";
        for (const auto& a : j.at("answers")) s.answers.push_back({a.at("key").get<std::string>(), ojson(a.at("value"))});
        where = "counters";
        s.last_t = j.at("last_t").get<std::int64_t>();
        s.next_artifact = j.at("next_artifact").get<std::uint64_t>();
        s.dwell_threshold_ms = j.at("dwell_threshold_ms").get<std::int64_t>();
    } catch (const SchemaError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(origin + ":" + where, 0, e.what());
    } catch (const Error& e) {
        throw SchemaError(origin + ":" + where, 0, e.what());
    }
    if (const auto bad = invariant_violations(s); !bad.empty()) {
        throw SchemaError(origin, 0, bad.front());
    }
    return s;
}

std::string_view to_string(Mode m) noexcept { return m == Mode::Unified ? "unified" : "separated"; }
std::string_view to_string(Space s) noexcept { return s == Space::Notebook ? "notebook" : "artifact"; }
std::string_view to_string(Hand h) noexcept { return h == Hand::Left ? "L" : "R"; }

std::optional<Mode> mode_from_string(std::string_view s) noexcept {
    if (s == "unified" || s == "Unified") return Mode::Unified;
    if (s == "separated" || s == "Separated") return Mode::Separated;
    return std::nullopt;
}

std::optional<Space> space_from_string(std::string_view s) noexcept {
    if (s == "notebook") return Space::Notebook;
    if (s == "artifact") return Space::Artifact;
    return std::nullopt;
}

std::optional<Hand> hand_from_string(std::string_view s) noexcept {
    if (s == "L" || s == "left") return Hand::Left;
    if (s == "R" || s == "right") return Hand::Right;
    return std::nullopt;
}

}  // namespace icon
