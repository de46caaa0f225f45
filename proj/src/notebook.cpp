#include "icon/notebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "icon/error.hpp"

namespace icon {

const Cell* Notebook::find_cell(std::string_view cell_id) const noexcept {
    for (const auto& w : windows) {
        for (const auto& c : w.cells) {
            if (c.id == cell_id) return &c;
        }
    }
    return nullptr;
}

Cell* Notebook::find_cell(std::string_view cell_id) noexcept {
    return const_cast<Cell*>(std::as_const(*this).find_cell(cell_id));
}

const Cell& Notebook::cell(std::string_view cell_id) const {
    const Cell* c = find_cell(cell_id);
    if (c == nullptr) {
        fail(ErrorCode::UnknownCell, "unknown cell '" + std::string(cell_id) + "'");
    }
    return *c;
}

Cell& Notebook::cell(std::string_view cell_id) { return const_cast<Cell&>(std::as_const(*this).cell(cell_id)); }

CellLocation Notebook::locate(std::string_view cell_id) const {
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (std::size_t c = 0; c < windows[w].cells.size(); ++c) {
            if (windows[w].cells[c].id == cell_id) return {w, c};
        }
    }
    fail(ErrorCode::UnknownCell, "unknown cell '" + std::string(cell_id) + "'");
}

const Window* Notebook::find_window(std::string_view window_id) const noexcept {
    for (const auto& w : windows) {
        if (w.id == window_id) return &w;
    }
    return nullptr;
}

std::vector<const Cell*> Notebook::cells() const {
    std::vector<const Cell*> out;
    for (const auto& w : windows) {
        for (const auto& c : w.cells) out.push_back(&c);
    }
    return out;
}

std::size_t Notebook::cell_count() const noexcept {
    std::size_t n = 0;
    for (const auto& w : windows) n += w.cells.size();
    return n;
}

void Notebook::validate(const std::string& origin) const {
    std::set<std::string_view> window_ids;
    std::set<std::string_view> cell_ids;
    for (const auto& w : windows) {
        if (w.id.empty() || !window_ids.insert(w.id).second) {
            throw SchemaError(origin, 0, "window id '" + w.id + "' is empty or repeated");
        }
        if (!in_arena(w.pose)) {
            throw SchemaError(origin, 0, "window '" + w.id + "' pose is outside the arena");
        }
        for (const auto& c : w.cells) {
            if (c.id.empty() || !cell_ids.insert(c.id).second) {
                throw SchemaError(origin, 0, "cell id '" + c.id + "' is empty or repeated");
            }
            if (c.kind != classify_cell(c.source)) {
                throw SchemaError(origin, 0, "cell '" + c.id + "' kind disagrees with its source");
            }
        }
    }
}

CellKind classify(const CellAst& ast) {
    bool data = false;
    bool vis = false;
    for (const auto& stmt : ast.statements) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PlotScatter> || std::is_same_v<T, KnnGraph>) {
                    vis = true;
                } else if constexpr (std::is_same_v<T, LoadDataset> || std::is_same_v<T, Assign> ||
                                     std::is_same_v<T, FilterExpr> || std::is_same_v<T, SelectCols>) {
                    data = true;
                }
            },
            stmt);
    }
    // A cell holding both yields a visualization: the pull gesture produces a single artifact.
    if (vis) return CellKind::Visualization;
    if (data) return CellKind::Data;
    return CellKind::Code;
}

CellKind classify_cell(std::string_view source) {
    const bool blank = std::all_of(source.begin(), source.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
    if (blank) return CellKind::Empty;
    return classify(parse_source(source));
}

const Cell& edit_cell(Notebook& nb, std::string_view cell_id, std::string new_source) {
    Cell& c = nb.cell(cell_id);
    c.kind = classify_cell(new_source);
    c.source = std::move(new_source);
    c.dirty = true;
    return c;
}

std::vector<Pose> layout_semicircle(const Notebook& nb, double radius, const Pose& center) {
    if (!(radius > 0.0)) {
        fail(ErrorCode::NonPositiveRadius, "layout radius must be positive");
    }
    const std::size_t n = nb.windows.size();
    std::vector<Pose> poses;
    poses.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double offset =
            n == 1 ? 0.0 : -std::numbers::pi / 2 + std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
        const double heading = center.yaw + offset;
        const auto f = forward(heading);
        Pose p;
        p.x = center.x + radius * f[0];
        p.y = center.y;
        p.z = center.z + radius * f[1];
        p.yaw = wrap_angle(heading + std::numbers::pi);
        poses.push_back(p);
    }
    return poses;
}

Pose cell_pose(const Notebook& nb, std::string_view cell_id) {
    const auto loc = nb.locate(cell_id);
    Pose p = nb.windows[loc.window].pose;
    p.y -= kCellSpacing * static_cast<double>(loc.cell);
    return p;
}

std::string_view to_string(CellKind k) noexcept {
    switch (k) {
        case CellKind::Empty: return "Empty";
        case CellKind::Code: return "Code";
        case CellKind::Data: return "Data";
        case CellKind::Visualization: return "Visualization";
    }
    return "Empty";
}

std::optional<CellKind> cell_kind_from_string(std::string_view s) noexcept {
    if (s == "Empty") return CellKind::Empty;
    if (s == "Code") return CellKind::Code;
    if (s == "Data") return CellKind::Data;
    if (s == "Visualization") return CellKind::Visualization;
    return std::nullopt;
}

nlohmann::ordered_json pose_to_json(const Pose& p) {
    return nlohmann::ordered_json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}};
}

Pose pose_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        fail(ErrorCode::BadCommand, "pose must be an object");
    }
    Pose p;
    auto field = [&](const char* key, double& out, bool required) {
        if (auto it = j.find(key); it != j.end()) {
            if (!it->is_number()) fail(ErrorCode::BadCommand, std::string("pose.") + key + " must be a number");
            out = it->get<double>();
        } else if (required) {
            fail(ErrorCode::BadCommand, std::string("pose.") + key + " is missing");
        }
    };
    field("x", p.x, true);
    field("y", p.y, false);
    field("z", p.z, true);
    field("yaw", p.yaw, false);
    return p;
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where,
                              const std::string& origin) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(origin, 0, where + ": missing '" + key + "'");
    }
    return *it;
}

std::string require_string(const nlohmann::json& j, const char* key, const std::string& where,
                           const std::string& origin) {
    const auto& v = require(j, key, where, origin);
    if (!v.is_string()) {
        throw SchemaError(origin, 0, where + "/" + key + ": expected a string");
    }
    return v.get<std::string>();
}

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

Notebook notebook_from_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object()) {
        throw SchemaError(origin, 0, "notebook must be a JSON object");
    }
    Notebook nb;
    nb.id = require_string(j, "id", "", origin);
    if (auto it = j.find("dialect"); it != j.end()) {
        if (!it->is_string()) throw SchemaError(origin, 0, "/dialect: expected a string");
        nb.dialect = it->get<std::string>();
    }
    const auto& windows = require(j, "windows", "", origin);
    if (!windows.is_array()) {
        throw SchemaError(origin, 0, "/windows: expected an array");
    }
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const auto& wj = windows[wi];
        const std::string where = "/windows/" + std::to_string(wi);
        if (!wj.is_object()) throw SchemaError(origin, 0, where + ": expected an object");
        Window w;
        w.id = require_string(wj, "id", where, origin);
        try {
            w.pose = pose_from_json(require(wj, "pose", where, origin));
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw SchemaError(origin, 0, where + "/pose: " + e.what());
        }
        const auto& cells = require(wj, "cells", where, origin);
        if (!cells.is_array()) throw SchemaError(origin, 0, where + "/cells: expected an array");
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            const auto& cj = cells[ci];
            const std::string cwhere = where + "/cells/" + std::to_string(ci);
            if (!cj.is_object()) throw SchemaError(origin, 0, cwhere + ": expected an object");
            Cell c;
            c.id = require_string(cj, "id", cwhere, origin);
            c.source = require_string(cj, "source", cwhere, origin);
            if (auto it = cj.find("kind"); it != cj.end()) {
                if (!it->is_string() || !cell_kind_from_string(it->get<std::string>())) {
                    throw SchemaError(origin, 0, cwhere + "/kind: not a cell kind");
                }
            }
            c.kind = classify_cell(c.source);
            if (auto it = cj.find("dirty"); it != cj.end() && it->is_boolean()) {
                c.dirty = it->get<bool>();
            }
            if (auto it = cj.find("outputs"); it != cj.end() && it->is_array()) {
                for (const auto& oj : *it) {
                    Output o;
                    o.kind = oj.value("kind", "display") == "error" ? Output::Kind::Error : Output::Kind::Display;
                    o.text = oj.value("text", "");
                    c.outputs.push_back(std::move(o));
                }
            }
            w.cells.push_back(std::move(c));
        }
        nb.windows.push_back(std::move(w));
    }
    nb.validate(origin);
    return nb;
}

Notebook parse_notebook(std::string_view text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(origin, line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    return notebook_from_json(j, origin);
}

Notebook load_notebook(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_notebook(ss.str(), path);
}

nlohmann::ordered_json notebook_to_json(const Notebook& nb) {
    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (const auto& w : nb.windows) {
        nlohmann::ordered_json cells = nlohmann::ordered_json::array();
        for (const auto& c : w.cells) {
            cells.push_back({{"id", c.id}, {"source", c.source}, {"kind", to_string(c.kind)}});
        }
        windows.push_back({{"id", w.id}, {"pose", pose_to_json(w.pose)}, {"cells", std::move(cells)}});
    }
    return {{"id", nb.id}, {"dialect", nb.dialect}, {"windows", std::move(windows)}};
}

nlohmann::ordered_json notebook_state_to_json(const Notebook& nb) {
    auto j = notebook_to_json(nb);
    for (std::size_t wi = 0; wi < nb.windows.size(); ++wi) {
        for (std::size_t ci = 0; ci < nb.windows[wi].cells.size(); ++ci) {
            const Cell& c = nb.windows[wi].cells[ci];
            auto& cj = j["windows"][wi]["cells"][ci];
            cj["dirty"] = c.dirty;
            nlohmann::ordered_json outs = nlohmann::ordered_json::array();
            for (const auto& o : c.outputs) {
                outs.push_back({{"kind", o.kind == Output::Kind::Error ? "error" : "display"}, {"text", o.text}});
            }
            cj["outputs"] = std::move(outs);
        }
    }
    return j;
}

void save_notebook(const Notebook& nb, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    out << notebook_to_json(nb).dump(2) << '\n';
}

}  // namespace icon
