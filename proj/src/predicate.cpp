#include "icon/predicate.hpp"

#include "icon/error.hpp"

namespace icon {

void check_filter_types(const Column& column, Comparator op, const Value& threshold) {
    const bool numeric_threshold = std::holds_alternative<double>(threshold);
    if (column.dtype == Dtype::Number) {
        if (!numeric_threshold) {
            fail(ErrorCode::TypeMismatch, "column '" + column.name + "' is numeric but the threshold is text");
        }
        return;
    }
    if (numeric_threshold) {
        fail(ErrorCode::TypeMismatch, "column '" + column.name + "' is text but the threshold is numeric");
    }
    if (op != Comparator::Equal && op != Comparator::NotEqual) {
        fail(ErrorCode::TypeMismatch, "ordered comparison on text column '" + column.name + "'");
    }
}

namespace {

template <typename T>
bool compare(const T& a, Comparator op, const T& b) {
    switch (op) {
        case Comparator::Less: return a < b;
        case Comparator::LessEq: return a <= b;
        case Comparator::Greater: return a > b;
        case Comparator::GreaterEq: return a >= b;
        case Comparator::Equal: return a == b;
        case Comparator::NotEqual: return a != b;
    }
    return false;
}

}  // namespace

bool satisfies(const Value& value, Comparator op, const Value& threshold) {
    if (const auto* d = std::get_if<double>(&value)) {
        return compare(*d, op, std::get<double>(threshold));
    }
    return compare(std::get<std::string>(value), op, std::get<std::string>(threshold));
}

TableExtract filter_table(const TableExtract& table, std::string_view column, Comparator op, const Value& threshold) {
    const auto idx = table.column_index(column);
    if (!idx) {
        fail(ErrorCode::UnknownColumn, "unknown column '" + std::string(column) + "'");
    }
    check_filter_types(table.columns[*idx], op, threshold);
    TableExtract out;
    out.columns = table.columns;
    for (const auto& row : table.rows) {
        if (satisfies(row[*idx], op, threshold)) out.rows.push_back(row);
    }
    return out;
}

}  // namespace icon
