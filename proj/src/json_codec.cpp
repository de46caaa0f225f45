#include "icon/json_codec.hpp"

#include <cmath>
#include <cstdio>

#include "icon/error.hpp"

namespace icon {

ojson number_to_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return HUGE_VAL;
        if (s == "-inf") return -HUGE_VAL;
    }
    fail(ErrorCode::BadCommand, "expected a number, got " + j.dump());
}

ojson value_to_json(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return number_to_json(*d);
    return std::get<std::string>(v);
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    fail(ErrorCode::BadCommand, "expected a number or string, got " + j.dump());
}

ojson table_to_json(const TableExtract& t) {
    ojson cols = ojson::array();
    for (const auto& c : t.columns) {
        cols.push_back({{"name", c.name}, {"dtype", to_string(c.dtype)}});
    }
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
        ojson r = ojson::array();
        for (const auto& v : row) r.push_back(value_to_json(v));
        rows.push_back(std::move(r));
    }
    return {{"columns", std::move(cols)}, {"rows", std::move(rows)}};
}

TableExtract table_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("columns") || !j.contains("rows")) {
        fail(ErrorCode::BadCommand, "table needs 'columns' and 'rows'");
    }
    TableExtract t;
    for (const auto& cj : j.at("columns")) {
        const auto dtype = dtype_from_string(cj.at("dtype").get<std::string>());
        if (!dtype) fail(ErrorCode::BadCommand, "unknown dtype " + cj.at("dtype").dump());
        t.columns.push_back({cj.at("name").get<std::string>(), *dtype});
    }
    for (const auto& rj : j.at("rows")) {
        if (!rj.is_array() || rj.size() != t.columns.size()) {
            fail(ErrorCode::TypeMismatch, "table row arity does not match columns");
        }
        std::vector<Value> row;
        row.reserve(rj.size());
        for (std::size_t c = 0; c < rj.size(); ++c) {
            if (t.columns[c].dtype == Dtype::Number) {
                row.emplace_back(number_from_json(rj[c]));
            } else {
                if (!rj[c].is_string()) fail(ErrorCode::TypeMismatch, "text cell must be a string");
                row.emplace_back(rj[c].get<std::string>());
            }
        }
        t.rows.push_back(std::move(row));
    }
    t.validate();
    return t;
}

ojson plot_to_json(const PlotExtract& p) {
    ojson pts = ojson::array();
    for (const auto& pt : p.points) {
        ojson a = ojson::array();
        for (double v : pt) a.push_back(number_to_json(v));
        pts.push_back(std::move(a));
    }
    ojson edges = ojson::array();
    for (const auto& [from, to] : p.edges) edges.push_back({from, to});
    ojson out{{"kind", to_string(p.kind)}, {"axis_names", p.axis_names}, {"points", std::move(pts)},
              {"colors", p.colors}, {"edges", std::move(edges)}};
    if (p.kind == PlotKind::NodeLink3D) out["k"] = p.knn_k;
    return out;
}

PlotExtract plot_from_json(const nlohmann::json& j) {
    PlotExtract p;
    const auto kind = plot_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorCode::BadCommand, "unknown plot kind " + j.at("kind").dump());
    p.kind = *kind;
    p.axis_names = j.at("axis_names").get<std::vector<std::string>>();
    for (const auto& pt : j.at("points")) {
        std::vector<double> v;
        for (const auto& x : pt) v.push_back(number_from_json(x));
        p.points.push_back(std::move(v));
    }
    p.colors = j.at("colors").get<std::vector<std::int64_t>>();
    for (const auto& e : j.at("edges")) {
        p.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    }
    p.knn_k = j.value("k", std::int64_t{0});
    p.validate();
    return p;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace icon
