#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "icon/table.hpp"
#include "json.hpp"

namespace icon {

using ojson = nlohmann::ordered_json;

// Non-finite numbers travel as the strings "nan", "inf" and "-inf"; the column dtype (or the
// field's schema) tells them apart from text.
[[nodiscard]] ojson number_to_json(double v);
[[nodiscard]] double number_from_json(const nlohmann::json& j);

[[nodiscard]] ojson value_to_json(const Value& v);
[[nodiscard]] Value value_from_json(const nlohmann::json& j);

[[nodiscard]] ojson table_to_json(const TableExtract& t);
[[nodiscard]] TableExtract table_from_json(const nlohmann::json& j);

[[nodiscard]] ojson plot_to_json(const PlotExtract& p);
[[nodiscard]] PlotExtract plot_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a, rendered as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

}  // namespace icon
