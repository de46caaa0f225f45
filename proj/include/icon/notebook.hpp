#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "icon/grammar.hpp"
#include "icon/pose.hpp"
#include "json.hpp"

namespace icon {

enum class CellKind { Empty, Code, Data, Visualization };

struct Output {
    enum class Kind { Display, Error };
    Kind kind = Kind::Display;
    std::string text;
    friend bool operator==(const Output&, const Output&) = default;
};

struct Cell {
    std::string id;
    std::string source;
    CellKind kind = CellKind::Empty;
    std::vector<Output> outputs;
    /// Edited since the last successful execution.
    bool dirty = false;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Window {
    std::string id;
    std::vector<Cell> cells;
    Pose pose;
    friend bool operator==(const Window&, const Window&) = default;
};

struct CellLocation {
    std::size_t window = 0;
    std::size_t cell = 0;
};

/// The code surface: windows in execution order, each holding an ordered run of cells.
struct Notebook {
    std::string id;
    std::string dialect = "python";
    std::vector<Window> windows;

    [[nodiscard]] const Cell* find_cell(std::string_view cell_id) const noexcept;
    [[nodiscard]] Cell* find_cell(std::string_view cell_id) noexcept;
    [[nodiscard]] const Cell& cell(std::string_view cell_id) const;  // throws UnknownCell
    [[nodiscard]] Cell& cell(std::string_view cell_id);
    [[nodiscard]] CellLocation locate(std::string_view cell_id) const;
    [[nodiscard]] const Window* find_window(std::string_view window_id) const noexcept;

    /// Cells in global execution order (concatenation of window orders).
    [[nodiscard]] std::vector<const Cell*> cells() const;
    [[nodiscard]] std::size_t cell_count() const noexcept;

    /// Checks id uniqueness, pose bounds, and kind/source consistency. Throws SchemaError.
    void validate(const std::string& origin = "<notebook>") const;

    friend bool operator==(const Notebook&, const Notebook&) = default;
};

[[nodiscard]] CellKind classify(const CellAst& ast);
[[nodiscard]] CellKind classify_cell(std::string_view source);

/// Replaces the source, re-derives the kind and marks the cell dirty (even for identical text).
const Cell& edit_cell(Notebook& nb, std::string_view cell_id, std::string new_source);

/// Windows spread evenly across a 180 degree arc of `radius` around `center`, each facing it.
/// One pose per window, in window order.
[[nodiscard]] std::vector<Pose> layout_semicircle(const Notebook& nb, double radius, const Pose& center);

/// Vertical spacing between stacked cells in a window.
inline constexpr double kCellSpacing = 0.35;

/// World pose of a cell: its window's pose shifted down by the cell's row.
[[nodiscard]] Pose cell_pose(const Notebook& nb, std::string_view cell_id);

[[nodiscard]] std::string_view to_string(CellKind k) noexcept;
[[nodiscard]] std::optional<CellKind> cell_kind_from_string(std::string_view s) noexcept;

// Notebook file format: {id, dialect, windows:[{id, pose:{x,y,z,yaw}, cells:[{id, source, kind?}]}]}.
// `kind` is optional on load and always recomputed.
[[nodiscard]] Notebook parse_notebook(std::string_view text, const std::string& origin = "<notebook>");
[[nodiscard]] Notebook load_notebook(const std::string& path);
[[nodiscard]] nlohmann::ordered_json notebook_to_json(const Notebook& nb);
void save_notebook(const Notebook& nb, const std::string& path);

/// Also accepts the persisted extras (outputs, dirty) written by notebook_state_to_json.
[[nodiscard]] Notebook notebook_from_json(const nlohmann::json& j, const std::string& origin);
[[nodiscard]] nlohmann::ordered_json notebook_state_to_json(const Notebook& nb);

[[nodiscard]] nlohmann::ordered_json pose_to_json(const Pose& p);
[[nodiscard]] Pose pose_from_json(const nlohmann::json& j);

}  // namespace icon
