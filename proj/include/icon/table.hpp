#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace icon {

enum class Dtype { Number, Text };

/// A single table cell: a double for numeric columns, UTF-8 text otherwise.
using Value = std::variant<double, std::string>;

struct Column {
    std::string name;
    Dtype dtype = Dtype::Number;

    friend bool operator==(const Column&, const Column&) = default;
};

/// Row-major snapshot of a tabular kernel value, in source column order.
struct TableExtract {
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;

    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view name) const noexcept;
    [[nodiscard]] std::size_t column_count() const noexcept { return columns.size(); }
    [[nodiscard]] std::size_t row_count() const noexcept { return rows.size(); }

    /// Numeric column as a contiguous vector. Throws UnknownColumn / NonNumeric.
    [[nodiscard]] std::vector<double> numeric_column(std::string_view name) const;

    /// Throws TypeMismatch if a row's arity or a value's dtype disagrees with the header,
    /// or if column names repeat.
    void validate() const;
};

enum class PlotKind { Scatter2D, Scatter3D, NodeLink3D };

/// Everything needed to re-render a plot as an interactive artifact.
struct PlotExtract {
    PlotKind kind = PlotKind::Scatter2D;
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> points;
    std::vector<std::int64_t> colors;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    /// Neighbor count that produced `edges`; only meaningful for NodeLink3D.
    std::int64_t knn_k = 0;

    [[nodiscard]] std::size_t dimension() const noexcept { return axis_names.size(); }

    /// Throws ArityMismatch / BadIndex when the invariants between fields are broken.
    void validate() const;
};

[[nodiscard]] std::string_view to_string(Dtype d) noexcept;
[[nodiscard]] std::string_view to_string(PlotKind k) noexcept;
[[nodiscard]] std::optional<Dtype> dtype_from_string(std::string_view s) noexcept;
[[nodiscard]] std::optional<PlotKind> plot_kind_from_string(std::string_view s) noexcept;
[[nodiscard]] std::size_t axis_count(PlotKind k) noexcept;

/// Bitwise equality: doubles compare by representation so -0.0 != 0.0; any NaN equals any NaN.
[[nodiscard]] bool same_bits(double a, double b) noexcept;
[[nodiscard]] bool identical(const Value& a, const Value& b) noexcept;
[[nodiscard]] bool identical(const TableExtract& a, const TableExtract& b) noexcept;
[[nodiscard]] bool identical(const PlotExtract& a, const PlotExtract& b) noexcept;

/// Shortest decimal that reads back to the same double.
[[nodiscard]] std::string shortest_decimal(double v);

/// Shortest round-trip decimal that still reads as a float literal ("2" becomes "2.0",
/// negative zero is "-0.0"); non-finite values use float("inf") / float("nan").
[[nodiscard]] std::string float_literal(double v);

[[nodiscard]] std::optional<double> parse_decimal(std::string_view text) noexcept;

}  // namespace icon
