#pragma once

#include "icon/grammar.hpp"
#include "icon/table.hpp"

namespace icon {

/// Throws TypeMismatch unless `threshold` has the column's dtype and, for text columns, the
/// comparator is == or !=.
void check_filter_types(const Column& column, Comparator op, const Value& threshold);

/// `value op threshold`; both operands must share a dtype.
[[nodiscard]] bool satisfies(const Value& value, Comparator op, const Value& threshold);

/// Rows of `table` for which `column op threshold` holds, in order.
[[nodiscard]] TableExtract filter_table(const TableExtract& table, std::string_view column, Comparator op,
                                        const Value& threshold);

}  // namespace icon
