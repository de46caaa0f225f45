#include "icon/table.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <set>
#include <system_error>

#include "icon/error.hpp"

namespace icon {

std::optional<std::size_t> TableExtract::column_index(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<double> TableExtract::numeric_column(std::string_view name) const {
    const auto idx = column_index(name);
    if (!idx) {
        fail(ErrorCode::UnknownColumn, "unknown column '" + std::string(name) + "'");
    }
    if (columns[*idx].dtype != Dtype::Number) {
        fail(ErrorCode::NonNumeric, "column '" + std::string(name) + "' is not numeric");
    }
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(std::get<double>(row[*idx]));
    }
    return out;
}

void TableExtract::validate() const {
    std::set<std::string_view> names;
    for (const auto& c : columns) {
        if (!names.insert(c.name).second) {
            fail(ErrorCode::TypeMismatch, "duplicate column '" + c.name + "'");
        }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != columns.size()) {
            fail(ErrorCode::TypeMismatch, "row " + std::to_string(r) + " has wrong arity");
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const bool is_num = std::holds_alternative<double>(rows[r][c]);
            if (is_num != (columns[c].dtype == Dtype::Number)) {
                fail(ErrorCode::TypeMismatch, "row " + std::to_string(r) + " column '" + columns[c].name +
                                                  "' does not match its dtype");
            }
        }
    }
}

void PlotExtract::validate() const {
    if (axis_names.size() != axis_count(kind)) {
        fail(ErrorCode::ArityMismatch, "axis count does not match plot kind");
    }
    if (colors.size() != points.size()) {
        fail(ErrorCode::ArityMismatch, "one color per point required");
    }
    for (const auto& p : points) {
        if (p.size() != axis_names.size()) {
            fail(ErrorCode::ArityMismatch, "point dimension does not match axes");
        }
    }
    if (kind != PlotKind::NodeLink3D && !edges.empty()) {
        fail(ErrorCode::ArityMismatch, "only node-link plots carry edges");
    }
    for (const auto& [from, to] : edges) {
        if (from >= points.size() || to >= points.size()) {
            fail(ErrorCode::BadIndex, "edge references a missing point");
        }
    }
}

std::string_view to_string(Dtype d) noexcept { return d == Dtype::Number ? "number" : "text"; }

std::string_view to_string(PlotKind k) noexcept {
    switch (k) {
        case PlotKind::Scatter2D: return "Scatter2D";
        case PlotKind::Scatter3D: return "Scatter3D";
        case PlotKind::NodeLink3D: return "NodeLink3D";
    }
    return "Scatter2D";
}

std::optional<Dtype> dtype_from_string(std::string_view s) noexcept {
    if (s == "number") return Dtype::Number;
    if (s == "text") return Dtype::Text;
    return std::nullopt;
}

std::optional<PlotKind> plot_kind_from_string(std::string_view s) noexcept {
    if (s == "Scatter2D") return PlotKind::Scatter2D;
    if (s == "Scatter3D") return PlotKind::Scatter3D;
    if (s == "NodeLink3D") return PlotKind::NodeLink3D;
    return std::nullopt;
}

std::size_t axis_count(PlotKind k) noexcept { return k == PlotKind::Scatter2D ? 2 : 3; }

bool same_bits(double a, double b) noexcept {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool identical(const Value& a, const Value& b) noexcept {
    if (a.index() != b.index()) {
        return false;
    }
    if (const auto* d = std::get_if<double>(&a)) {
        return same_bits(*d, std::get<double>(b));
    }
    return std::get<std::string>(a) == std::get<std::string>(b);
}

bool identical(const TableExtract& a, const TableExtract& b) noexcept {
    if (a.columns != b.columns || a.rows.size() != b.rows.size()) {
        return false;
    }
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        if (a.rows[r].size() != b.rows[r].size()) {
            return false;
        }
        for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
            if (!identical(a.rows[r][c], b.rows[r][c])) {
                return false;
            }
        }
    }
    return true;
}

bool identical(const PlotExtract& a, const PlotExtract& b) noexcept {
    if (a.kind != b.kind || a.axis_names != b.axis_names || a.colors != b.colors || a.edges != b.edges ||
        a.knn_k != b.knn_k || a.points.size() != b.points.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].size() != b.points[i].size()) {
            return false;
        }
        for (std::size_t d = 0; d < a.points[i].size(); ++d) {
            if (!same_bits(a.points[i][d], b.points[i][d])) {
                return false;
            }
        }
    }
    return true;
}

std::string shortest_decimal(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string float_literal(double v) {
    if (std::isnan(v)) {
        return "float(\"nan\")";
    }
    if (std::isinf(v)) {
        return v > 0 ? "float(\"inf\")" : "float(\"-inf\")";
    }
    std::string s = shortest_decimal(v);
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::optional<double> parse_decimal(std::string_view text) noexcept {
    if (text.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v, std::chars_format::general);
    if (res.ec != std::errc() || res.ptr != last) {
        return std::nullopt;
    }
    return v;
}

}  // namespace icon
