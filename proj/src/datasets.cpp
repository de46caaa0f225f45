#include "icon/datasets.hpp"

#include <map>
#include <mutex>

#include "icon/error.hpp"

namespace icon {

namespace embedded {
extern const std::string_view kWineCsv;
extern const std::string_view kIrisCsv;
extern const std::string_view kStudyNotebook;
}  // namespace embedded

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

TableExtract parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(split_csv_line(line));
        start = nl + 1;
    }
    TableExtract t;
    if (lines.empty()) {
        return t;
    }
    for (auto& name : lines.front()) {
        t.columns.push_back({std::move(name), Dtype::Number});
    }
    const std::size_t ncol = t.columns.size();
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].size() != ncol) {
            fail(ErrorCode::TypeMismatch, "csv row " + std::to_string(r) + " has " + std::to_string(lines[r].size()) +
                                              " fields, expected " + std::to_string(ncol));
        }
        for (std::size_t c = 0; c < ncol; ++c) {
            if (!parse_decimal(lines[r][c])) t.columns[c].dtype = Dtype::Text;
        }
    }
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::vector<Value> row;
        row.reserve(ncol);
        for (std::size_t c = 0; c < ncol; ++c) {
            if (t.columns[c].dtype == Dtype::Number) {
                row.emplace_back(*parse_decimal(lines[r][c]));
            } else {
                row.emplace_back(std::move(lines[r][c]));
            }
        }
        t.rows.push_back(std::move(row));
    }
    t.validate();
    return t;
}

std::string_view embedded_file(std::string_view name) {
    if (name == "wine.csv") return embedded::kWineCsv;
    if (name == "iris.csv") return embedded::kIrisCsv;
    if (name == "study_notebook.json") return embedded::kStudyNotebook;
    fail(ErrorCode::IoError, "no bundled file named '" + std::string(name) + "'");
}

std::shared_ptr<const TableExtract> builtin_dataset(std::string_view name) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const TableExtract>, std::less<>> cache;
    if (name != "wine" && name != "iris") {
        return nullptr;
    }
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) {
        return it->second;
    }
    auto table = std::make_shared<const TableExtract>(parse_csv(embedded_file(std::string(name) + ".csv")));
    cache.emplace(std::string(name), table);
    return table;
}

std::vector<std::string> builtin_dataset_names() { return {"iris", "wine"}; }

}  // namespace icon
