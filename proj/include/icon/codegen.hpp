#pragma once

#include <string>
#include <string_view>

#include "icon/artifacts.hpp"
#include "icon/notebook.hpp"

namespace icon {

enum class CodegenMode { Create, Update };

struct CodegenResult {
    std::string cell_id;
    std::string new_source;
    CodegenMode mode = CodegenMode::Create;
    std::string variable;
    friend bool operator==(const CodegenResult&, const CodegenResult&) = default;
};

/// Lowest dfN (N >= 1) that no cell of the notebook mentions as an identifier.
[[nodiscard]] std::string name_fresh_variable(const Notebook& nb);

/// Source for an Empty target cell: a literal table for a table artifact, or a literal table
/// of the plotted axes followed by the matching plot statement for a visualization.
/// Throws TargetNotEmpty / UnknownCell.
[[nodiscard]] CodegenResult generate_create(const Artifact& artifact, const Notebook& nb, std::string_view target_cell);

/// Rewrites the artifact's origin cell to a literal reassignment of its displayed state. Opaque
/// lines of the old source are kept, in order, above the generated code.
/// Throws OriginMismatch / AmbiguousVariable / UnknownCell.
[[nodiscard]] CodegenResult generate_update(const Artifact& artifact, const Notebook& nb, std::string_view origin_cell);

/// Canonical literal statement binding `var` to `table`.
[[nodiscard]] Statement table_literal_statement(const std::string& var, const TableExtract& table);

[[nodiscard]] std::string_view to_string(CodegenMode m) noexcept;

}  // namespace icon
