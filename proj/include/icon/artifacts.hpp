#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "icon/grammar.hpp"
#include "icon/pose.hpp"
#include "icon/table.hpp"

namespace icon {

using ArtifactId = std::string;

enum class SortDirection { Ascending, Descending };

struct SortState {
    std::string column;
    SortDirection direction = SortDirection::Ascending;
    friend bool operator==(const SortState&, const SortState&) = default;
};

struct RowFilter {
    std::string column;
    Comparator op = Comparator::Less;
    Value threshold;
    friend bool operator==(const RowFilter&, const RowFilter&) = default;
};

/// An embodied data table. The base extract is never modified; what the user sees is always
/// re-derived from it (minus excluded rows, through the filters, then sorted).
struct TableArtifact {
    ArtifactId id;
    std::optional<std::string> origin_cell;
    std::shared_ptr<const TableExtract> base;
    std::optional<SortState> sort;
    std::vector<RowFilter> filters;
    std::set<std::string> selected_columns;
    /// Columns already turned into a visualization ("marked in blue").
    std::set<std::string> vis_columns;
    /// Base row indices dropped because their points were discarded from a linked visualization.
    std::set<std::size_t> excluded_rows;
    Pose pose;

    /// Base row indices in display order. Base row index doubles as the stable row id.
    [[nodiscard]] std::vector<std::size_t> displayed_row_ids() const;
    [[nodiscard]] TableExtract displayed() const;

    friend bool operator==(const TableArtifact& a, const TableArtifact& b);
};

struct VisArtifact {
    ArtifactId id;
    std::optional<std::string> origin_cell;
    std::optional<ArtifactId> origin_table;
    PlotExtract extract;
    /// Row id behind each point (base row of the origin table, or source row of the plotted cell).
    std::vector<std::size_t> row_ids;
    /// Row ids at creation; the difference with `row_ids` is what the user discarded.
    std::vector<std::size_t> source_row_ids;
    Pose pose;

    [[nodiscard]] PlotKind kind() const noexcept { return extract.kind; }

    friend bool operator==(const VisArtifact& a, const VisArtifact& b);
};

using Artifact = std::variant<TableArtifact, VisArtifact>;

[[nodiscard]] const ArtifactId& artifact_id(const Artifact& a) noexcept;
[[nodiscard]] const std::optional<std::string>& artifact_origin_cell(const Artifact& a) noexcept;
[[nodiscard]] Pose& artifact_pose(Artifact& a) noexcept;

[[nodiscard]] TableArtifact make_table_artifact(ArtifactId id, std::shared_ptr<const TableExtract> base,
                                                std::optional<std::string> origin_cell, const Pose& pose);
[[nodiscard]] VisArtifact make_vis_artifact(ArtifactId id, PlotExtract extract, std::optional<std::string> origin_cell,
                                            const Pose& pose);

[[nodiscard]] TableArtifact sort_table(TableArtifact table, const std::string& column, SortDirection direction);
[[nodiscard]] TableArtifact filter_rows(TableArtifact table, const std::string& column, Comparator op,
                                        const Value& threshold);
[[nodiscard]] TableArtifact remove_filter(TableArtifact table, std::size_t index);
[[nodiscard]] TableArtifact select_column(TableArtifact table, const std::string& column);

/// Pairs the displayed values of two selected numeric columns into a 2D scatter. Returns the
/// table with both columns marked as visualized, and the new visualization tethered to it.
[[nodiscard]] std::pair<TableArtifact, VisArtifact> merge_columns_to_vis(TableArtifact table, const std::string& col_a,
                                                                         const std::string& col_b, ArtifactId vis_id,
                                                                         const Pose& drop_pose);

/// Appends a third axis taken from `table`, matched to points by row id.
[[nodiscard]] VisArtifact add_axis(VisArtifact vis, const TableArtifact& table, const std::string& column);
[[nodiscard]] VisArtifact remove_axis(VisArtifact vis, std::size_t axis_index);
[[nodiscard]] VisArtifact remove_point(VisArtifact vis, std::size_t point_index);

/// Drops the table rows whose points were discarded from `vis` and unties the two.
[[nodiscard]] std::pair<VisArtifact, TableArtifact> apply_vis_to_table(VisArtifact vis, TableArtifact table);

[[nodiscard]] std::string_view to_string(SortDirection d) noexcept;
[[nodiscard]] std::optional<SortDirection> sort_direction_from_string(std::string_view s) noexcept;

}  // namespace icon
