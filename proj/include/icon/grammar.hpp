#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "icon/table.hpp"

// Closed line-oriented statement grammar for notebook cells. Each source line is exactly one
// statement; anything that does not match a production is kept verbatim as Opaque.
//
//   VAR = load_dataset("name")
//   VAR = SRC
//   VAR = pd.DataFrame({"col": pd.Series([v, ...], dtype="float64"|"object"), ...})
//   VAR = SRC[SRC["col"] <op> threshold]                      op in < <= > >= == !=
//   VAR = SRC[["a", "b", ...]]
//   plt.scatter(SRC["x"], SRC["y"][, c=COLOR])
//   ax.scatter(SRC["x"], SRC["y"], SRC["z"][, c=COLOR])
//   VAR = kmeans(SRC, K)
//   knn_graph(SRC["x"], SRC["y"], SRC["z"], k=K[, c=COLOR])
//   NAME = number[  # range: lo..hi]
//
// COLOR is a variable holding cluster labels or an integer list literal; K is an integer
// literal or a variable name.

namespace icon {

using IntArg = std::variant<std::int64_t, std::string>;

/// Per-point color source for plots. monostate means "no colors" (all zero).
using ColorSource = std::variant<std::monostate, std::string, std::vector<std::int64_t>>;

enum class Comparator { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

struct LoadDataset {
    std::string var;
    std::string dataset;
    friend bool operator==(const LoadDataset&, const LoadDataset&) = default;
};

struct LiteralColumn {
    std::string name;
    Dtype dtype = Dtype::Number;
    std::vector<Value> values;
    friend bool operator==(const LiteralColumn&, const LiteralColumn&) = default;
};

struct TableLiteral {
    std::vector<LiteralColumn> columns;
    friend bool operator==(const TableLiteral&, const TableLiteral&) = default;
};

struct Assign {
    std::string var;
    std::variant<std::string, TableLiteral> expr;
    friend bool operator==(const Assign&, const Assign&) = default;
};

struct FilterExpr {
    std::string var;
    std::string source;
    std::string column;
    Comparator op = Comparator::Less;
    Value threshold;
    friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct SelectCols {
    std::string var;
    std::string source;
    std::vector<std::string> columns;
    friend bool operator==(const SelectCols&, const SelectCols&) = default;
};

struct PlotScatter {
    std::string source;
    std::vector<std::string> columns;  // 2 or 3
    ColorSource color;
    friend bool operator==(const PlotScatter&, const PlotScatter&) = default;
};

struct KMeans {
    std::string var;
    std::string source;
    IntArg k;
    friend bool operator==(const KMeans&, const KMeans&) = default;
};

struct KnnGraph {
    std::string source;
    std::vector<std::string> columns;  // always 3
    IntArg k;
    ColorSource color;
    friend bool operator==(const KnnGraph&, const KnnGraph&) = default;
};

struct ParamDecl {
    std::string name;
    double value = 0.0;
    std::optional<std::pair<double, double>> range;
    friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct Opaque {
    std::string text;
    friend bool operator==(const Opaque&, const Opaque&) = default;
};

using Statement = std::variant<LoadDataset, Assign, FilterExpr, SelectCols, PlotScatter, KMeans, KnnGraph,
                               ParamDecl, Opaque>;

struct CellAst {
    std::vector<Statement> statements;
    friend bool operator==(const CellAst&, const CellAst&) = default;
};

/// Total: never throws. Empty source yields no statements; otherwise one statement per '\n'-separated line.
[[nodiscard]] CellAst parse_source(std::string_view source);
[[nodiscard]] Statement parse_line(std::string_view line);

[[nodiscard]] std::string render(const CellAst& ast);
[[nodiscard]] std::string render(const Statement& stmt);

/// Variable the statement binds, if any.
[[nodiscard]] std::optional<std::string> defined_variable(const Statement& stmt);

/// Distinct variables bound by the cell, in first-definition order.
[[nodiscard]] std::vector<std::string> defined_variables(const CellAst& ast);

/// Every identifier the statement binds or reads.
[[nodiscard]] std::vector<std::string> mentioned_names(const Statement& stmt);

[[nodiscard]] std::string quote(std::string_view text);
[[nodiscard]] std::string_view to_string(Comparator op) noexcept;
[[nodiscard]] std::optional<Comparator> comparator_from_string(std::string_view s) noexcept;
[[nodiscard]] bool is_identifier(std::string_view s) noexcept;

}  // namespace icon
