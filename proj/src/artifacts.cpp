#include "icon/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icon/error.hpp"
#include "icon/predicate.hpp"

namespace icon {

bool operator==(const TableArtifact& a, const TableArtifact& b) {
    const bool same_base = a.base == b.base || (a.base && b.base && identical(*a.base, *b.base));
    return a.id == b.id && a.origin_cell == b.origin_cell && same_base && a.sort == b.sort && a.filters == b.filters &&
           a.selected_columns == b.selected_columns && a.vis_columns == b.vis_columns &&
           a.excluded_rows == b.excluded_rows && a.pose == b.pose;
}

bool operator==(const VisArtifact& a, const VisArtifact& b) {
    return a.id == b.id && a.origin_cell == b.origin_cell && a.origin_table == b.origin_table &&
           identical(a.extract, b.extract) && a.row_ids == b.row_ids && a.source_row_ids == b.source_row_ids &&
           a.pose == b.pose;
}

const ArtifactId& artifact_id(const Artifact& a) noexcept {
    return std::visit([](const auto& x) -> const ArtifactId& { return x.id; }, a);
}

const std::optional<std::string>& artifact_origin_cell(const Artifact& a) noexcept {
    return std::visit([](const auto& x) -> const std::optional<std::string>& { return x.origin_cell; }, a);
}

Pose& artifact_pose(Artifact& a) noexcept {
    return std::visit([](auto& x) -> Pose& { return x.pose; }, a);
}

namespace {

std::size_t require_column(const TableExtract& t, const std::string& column) {
    const auto idx = t.column_index(column);
    if (!idx) {
        fail(ErrorCode::UnknownColumn, "unknown column '" + column + "'");
    }
    return *idx;
}

// NaN sorts after every number so the ordering stays strict-weak.
bool value_less(const Value& a, const Value& b) {
    if (const auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (std::isnan(*x)) return false;
        if (std::isnan(y)) return true;
        return *x < y;
    }
    return std::get<std::string>(a) < std::get<std::string>(b);
}

std::vector<std::size_t> iota_ids(std::size_t n) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return ids;
}

}  // namespace

std::vector<std::size_t> TableArtifact::displayed_row_ids() const {
    std::vector<std::size_t> ids;
    if (!base) return ids;
    std::vector<std::size_t> filter_cols;
    for (const auto& f : filters) filter_cols.push_back(require_column(*base, f.column));
    for (std::size_t r = 0; r < base->rows.size(); ++r) {
        if (excluded_rows.contains(r)) continue;
        bool keep = true;
        for (std::size_t i = 0; i < filters.size() && keep; ++i) {
            keep = satisfies(base->rows[r][filter_cols[i]], filters[i].op, filters[i].threshold);
        }
        if (keep) ids.push_back(r);
    }
    if (sort) {
        const std::size_t col = require_column(*base, sort->column);
        const auto& rows = base->rows;
        if (sort->direction == SortDirection::Ascending) {
            std::stable_sort(ids.begin(), ids.end(),
                             [&](std::size_t a, std::size_t b) { return value_less(rows[a][col], rows[b][col]); });
        } else {
            std::stable_sort(ids.begin(), ids.end(),
                             [&](std::size_t a, std::size_t b) { return value_less(rows[b][col], rows[a][col]); });
        }
    }
    return ids;
}

TableExtract TableArtifact::displayed() const {
    TableExtract out;
    if (!base) return out;
    out.columns = base->columns;
    for (auto r : displayed_row_ids()) out.rows.push_back(base->rows[r]);
    return out;
}

TableArtifact make_table_artifact(ArtifactId id, std::shared_ptr<const TableExtract> base,
                                  std::optional<std::string> origin_cell, const Pose& pose) {
    TableArtifact t;
    t.id = std::move(id);
    t.base = std::move(base);
    t.origin_cell = std::move(origin_cell);
    t.pose = pose;
    return t;
}

VisArtifact make_vis_artifact(ArtifactId id, PlotExtract extract, std::optional<std::string> origin_cell,
                              const Pose& pose) {
    VisArtifact v;
    v.id = std::move(id);
    v.row_ids = iota_ids(extract.points.size());
    v.source_row_ids = v.row_ids;
    v.extract = std::move(extract);
    v.origin_cell = std::move(origin_cell);
    v.pose = pose;
    return v;
}

TableArtifact sort_table(TableArtifact table, const std::string& column, SortDirection direction) {
    require_column(*table.base, column);
    table.sort = SortState{column, direction};
    return table;
}

TableArtifact filter_rows(TableArtifact table, const std::string& column, Comparator op, const Value& threshold) {
    const auto idx = require_column(*table.base, column);
    check_filter_types(table.base->columns[idx], op, threshold);
    table.filters.push_back({column, op, threshold});
    return table;
}

TableArtifact remove_filter(TableArtifact table, std::size_t index) {
    if (index >= table.filters.size()) {
        fail(ErrorCode::BadIndex, "no filter at index " + std::to_string(index));
    }
    table.filters.erase(table.filters.begin() + static_cast<std::ptrdiff_t>(index));
    return table;
}

TableArtifact select_column(TableArtifact table, const std::string& column) {
    require_column(*table.base, column);
    if (!table.selected_columns.erase(column)) {
        table.selected_columns.insert(column);
    }
    return table;
}

std::pair<TableArtifact, VisArtifact> merge_columns_to_vis(TableArtifact table, const std::string& col_a,
                                                           const std::string& col_b, ArtifactId vis_id,
                                                           const Pose& drop_pose) {
    const auto ia = require_column(*table.base, col_a);
    const auto ib = require_column(*table.base, col_b);
    if (col_a == col_b) {
        fail(ErrorCode::SameColumn, "cannot merge column '" + col_a + "' with itself");
    }
    if (!table.selected_columns.contains(col_a) || !table.selected_columns.contains(col_b)) {
        fail(ErrorCode::ColumnsNotSelected, "both columns must be selected before merging");
    }
    if (table.base->columns[ia].dtype != Dtype::Number || table.base->columns[ib].dtype != Dtype::Number) {
        fail(ErrorCode::NonNumeric, "only numeric columns can be plotted");
    }
    VisArtifact vis;
    vis.id = std::move(vis_id);
    vis.origin_table = table.id;
    vis.pose = drop_pose;
    vis.extract.kind = PlotKind::Scatter2D;
    vis.extract.axis_names = {col_a, col_b};
    for (auto r : table.displayed_row_ids()) {
        const auto& row = table.base->rows[r];
        vis.extract.points.push_back({std::get<double>(row[ia]), std::get<double>(row[ib])});
        vis.row_ids.push_back(r);
    }
    vis.extract.colors.assign(vis.extract.points.size(), 0);
    vis.source_row_ids = vis.row_ids;
    table.vis_columns.insert(col_a);
    table.vis_columns.insert(col_b);
    return {std::move(table), std::move(vis)};
}

VisArtifact add_axis(VisArtifact vis, const TableArtifact& table, const std::string& column) {
    if (vis.extract.kind != PlotKind::Scatter2D) {
        fail(ErrorCode::ArityMismatch, "only a 2D scatter can take another axis");
    }
    const auto idx = require_column(*table.base, column);
    if (table.base->columns[idx].dtype != Dtype::Number) {
        fail(ErrorCode::NonNumeric, "column '" + column + "' is not numeric");
    }
    if (std::find(vis.extract.axis_names.begin(), vis.extract.axis_names.end(), column) !=
        vis.extract.axis_names.end()) {
        fail(ErrorCode::SameColumn, "column '" + column + "' is already an axis");
    }
    if (vis.origin_table == table.id) {
        const auto shown = table.displayed_row_ids();
        const std::set<std::size_t> visible(shown.begin(), shown.end());
        for (auto r : vis.row_ids) {
            if (!visible.contains(r)) {
                fail(ErrorCode::ArityMismatch, "table no longer shows every plotted row");
            }
        }
    } else if (vis.source_row_ids.size() != table.base->row_count()) {
        fail(ErrorCode::ArityMismatch, "table has " + std::to_string(table.base->row_count()) +
                                           " rows but the plot was drawn from " +
                                           std::to_string(vis.source_row_ids.size()));
    }
    for (std::size_t i = 0; i < vis.extract.points.size(); ++i) {
        vis.extract.points[i].push_back(std::get<double>(table.base->rows[vis.row_ids[i]][idx]));
    }
    vis.extract.axis_names.push_back(column);
    vis.extract.kind = PlotKind::Scatter3D;
    return vis;
}

VisArtifact remove_axis(VisArtifact vis, std::size_t axis_index) {
    if (vis.extract.kind != PlotKind::Scatter3D) {
        fail(ErrorCode::NotThreeD, "only a 3D scatter can drop an axis");
    }
    if (axis_index >= vis.extract.axis_names.size()) {
        fail(ErrorCode::BadIndex, "no axis at index " + std::to_string(axis_index));
    }
    const auto pos = static_cast<std::ptrdiff_t>(axis_index);
    vis.extract.axis_names.erase(vis.extract.axis_names.begin() + pos);
    for (auto& p : vis.extract.points) p.erase(p.begin() + pos);
    vis.extract.kind = PlotKind::Scatter2D;
    return vis;
}

VisArtifact remove_point(VisArtifact vis, std::size_t point_index) {
    if (point_index >= vis.extract.points.size()) {
        fail(ErrorCode::BadIndex, "no point at index " + std::to_string(point_index));
    }
    const auto pos = static_cast<std::ptrdiff_t>(point_index);
    vis.extract.points.erase(vis.extract.points.begin() + pos);
    vis.extract.colors.erase(vis.extract.colors.begin() + pos);
    vis.row_ids.erase(vis.row_ids.begin() + pos);
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (auto [from, to] : vis.extract.edges) {
        if (from == point_index || to == point_index) continue;
        if (from > point_index) --from;
        if (to > point_index) --to;
        kept.emplace_back(from, to);
    }
    vis.extract.edges = std::move(kept);
    return vis;
}

std::pair<VisArtifact, TableArtifact> apply_vis_to_table(VisArtifact vis, TableArtifact table) {
    if (vis.origin_table != table.id) {
        fail(ErrorCode::OriginMismatch, "visualization '" + vis.id + "' was not built from table '" + table.id + "'");
    }
    const std::set<std::size_t> remaining(vis.row_ids.begin(), vis.row_ids.end());
    for (auto r : vis.source_row_ids) {
        if (!remaining.contains(r)) table.excluded_rows.insert(r);
    }
    vis.origin_table.reset();
    return {std::move(vis), std::move(table)};
}

std::string_view to_string(SortDirection d) noexcept { return d == SortDirection::Ascending ? "asc" : "desc"; }

std::optional<SortDirection> sort_direction_from_string(std::string_view s) noexcept {
    if (s == "asc" || s == "ascending") return SortDirection::Ascending;
    if (s == "desc" || s == "descending") return SortDirection::Descending;
    return std::nullopt;
}

}  // namespace icon
