#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "icon/table.hpp"

namespace icon {

/// Parses a header-first CSV. A column is numeric when every one of its cells parses as a
/// decimal; otherwise it is text. Double-quoted fields may contain commas and "" escapes.
[[nodiscard]] TableExtract parse_csv(std::string_view text);

/// Bundled dataset snapshots ("wine", "iris"). Returns nullptr for unknown names.
[[nodiscard]] std::shared_ptr<const TableExtract> builtin_dataset(std::string_view name);
[[nodiscard]] std::vector<std::string> builtin_dataset_names();

/// Raw text of a bundled file: "wine.csv", "iris.csv", "study_notebook.json".
[[nodiscard]] std::string_view embedded_file(std::string_view name);

}  // namespace icon
