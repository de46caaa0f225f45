#include "icon/kernel.hpp"

#include <cmath>
#include <set>

#include "icon/cluster.hpp"
#include "icon/datasets.hpp"
#include "icon/error.hpp"
#include "icon/grammar.hpp"
#include "icon/predicate.hpp"

namespace icon {

ojson exec_result_to_json(const ExecResult& r) {
    ojson j{{"cell_id", r.cell_id}, {"status", r.ok ? "ok" : "error"}};
    if (!r.ok) j["message"] = r.error;
    j["defined_vars"] = r.defined_vars;
    if (r.display) {
        j["display"] = {{"kind", to_string(r.display->kind)},
                        {"axis_names", r.display->axis_names},
                        {"points", r.display->point_count}};
    }
    return j;
}

ExecResult exec_result_from_json(const nlohmann::json& j) {
    ExecResult r;
    r.cell_id = j.at("cell_id").get<std::string>();
    r.ok = j.at("status").get<std::string>() == "ok";
    if (!r.ok) r.error = j.value("message", "");
    r.defined_vars = j.value("defined_vars", std::vector<std::string>{});
    if (auto it = j.find("display"); it != j.end() && it->is_object()) {
        DisplayDescriptor d;
        d.kind = plot_kind_from_string(it->at("kind").get<std::string>()).value_or(PlotKind::Scatter2D);
        d.axis_names = it->at("axis_names").get<std::vector<std::string>>();
        d.point_count = it->at("points").get<std::size_t>();
        r.display = std::move(d);
    }
    return r;
}

namespace {

using Env = std::map<std::string, MockKernel::KernelValue, std::less<>>;
using TablePtr = std::shared_ptr<const TableExtract>;

[[noreturn]] void kernel_error(const std::string& msg) { fail(ErrorCode::KernelError, msg); }

const MockKernel::KernelValue& lookup(const Env& env, std::string_view name) {
    auto it = env.find(name);
    if (it == env.end()) {
        kernel_error("undefined variable '" + std::string(name) + "'");
    }
    return it->second;
}

TablePtr lookup_table(const Env& env, std::string_view name) {
    const auto& v = lookup(env, name);
    if (const auto* t = std::get_if<TablePtr>(&v)) return *t;
    kernel_error("'" + std::string(name) + "' is not a table");
}

std::int64_t resolve_k(const Env& env, const IntArg& k) {
    if (const auto* i = std::get_if<std::int64_t>(&k)) return *i;
    const auto& name = std::get<std::string>(k);
    const auto& v = lookup(env, name);
    const auto* d = std::get_if<double>(&v);
    if (d == nullptr || !std::isfinite(*d) || std::floor(*d) != *d) {
        kernel_error("'" + name + "' is not an integer");
    }
    return static_cast<std::int64_t>(*d);
}

std::vector<std::int64_t> resolve_colors(const Env& env, const ColorSource& color, std::size_t n) {
    std::vector<std::int64_t> labels;
    if (std::holds_alternative<std::monostate>(color)) {
        labels.assign(n, 0);
    } else if (const auto* name = std::get_if<std::string>(&color)) {
        const auto& v = lookup(env, *name);
        const auto* l = std::get_if<std::shared_ptr<const MockKernel::Labels>>(&v);
        if (l == nullptr) kernel_error("'" + *name + "' does not hold cluster labels");
        labels = **l;
    } else {
        labels = std::get<std::vector<std::int64_t>>(color);
    }
    if (labels.size() != n) {
        kernel_error("color count " + std::to_string(labels.size()) + " does not match " + std::to_string(n) +
                     " points");
    }
    return labels;
}

std::vector<std::vector<double>> plot_points(const TableExtract& t, const std::vector<std::string>& columns) {
    std::set<std::string_view> seen;
    std::vector<std::vector<double>> cols;
    for (const auto& c : columns) {
        if (!seen.insert(c).second) kernel_error("axis column '" + c + "' repeats");
        cols.push_back(t.numeric_column(c));
    }
    std::vector<std::vector<double>> points(t.row_count());
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        for (const auto& col : cols) points[r].push_back(col[r]);
    }
    return points;
}

TablePtr build_literal(const TableLiteral& lit) {
    auto t = std::make_shared<TableExtract>();
    std::size_t rows = lit.columns.empty() ? 0 : lit.columns.front().values.size();
    for (const auto& c : lit.columns) {
        if (c.values.size() != rows) kernel_error("column '" + c.name + "' length differs from the others");
        t->columns.push_back({c.name, c.dtype});
    }
    t->rows.assign(rows, {});
    for (std::size_t r = 0; r < rows; ++r) {
        for (const auto& c : lit.columns) t->rows[r].push_back(c.values[r]);
    }
    t->validate();
    return t;
}

struct Interpreter {
    Env& env;
    std::shared_ptr<const PlotExtract>& display;

    void operator()(const LoadDataset& s) {
        auto t = builtin_dataset(s.dataset);
        if (!t) kernel_error("unknown dataset '" + s.dataset + "'");
        env[s.var] = t;
    }

    void operator()(const Assign& s) {
        if (const auto* src = std::get_if<std::string>(&s.expr)) {
            env[s.var] = MockKernel::KernelValue(lookup(env, *src));
        } else {
            env[s.var] = build_literal(std::get<TableLiteral>(s.expr));
        }
    }

    void operator()(const FilterExpr& s) {
        auto t = lookup_table(env, s.source);
        env[s.var] = std::make_shared<const TableExtract>(filter_table(*t, s.column, s.op, s.threshold));
    }

    void operator()(const SelectCols& s) {
        auto t = lookup_table(env, s.source);
        std::vector<std::size_t> idx;
        std::set<std::string_view> seen;
        auto out = std::make_shared<TableExtract>();
        for (const auto& c : s.columns) {
            auto i = t->column_index(c);
            if (!i) kernel_error("unknown column '" + c + "'");
            if (!seen.insert(c).second) kernel_error("column '" + c + "' selected twice");
            idx.push_back(*i);
            out->columns.push_back(t->columns[*i]);
        }
        for (const auto& row : t->rows) {
            std::vector<Value> r;
            for (auto i : idx) r.push_back(row[i]);
            out->rows.push_back(std::move(r));
        }
        env[s.var] = TablePtr(std::move(out));
    }

    void operator()(const PlotScatter& s) {
        auto t = lookup_table(env, s.source);
        auto p = std::make_shared<PlotExtract>();
        p->kind = s.columns.size() == 3 ? PlotKind::Scatter3D : PlotKind::Scatter2D;
        p->axis_names = s.columns;
        p->points = plot_points(*t, s.columns);
        p->colors = resolve_colors(env, s.color, p->points.size());
        display = std::move(p);
    }

    void operator()(const KMeans& s) {
        auto t = lookup_table(env, s.source);
        const auto k = resolve_k(env, s.k);
        std::vector<std::string> numeric;
        for (const auto& c : t->columns) {
            if (c.dtype == Dtype::Number) numeric.push_back(c.name);
        }
        if (numeric.empty()) kernel_error("kmeans needs at least one numeric column");
        std::vector<std::vector<double>> points(t->row_count());
        for (const auto& name : numeric) {
            const auto col = t->numeric_column(name);
            for (std::size_t r = 0; r < col.size(); ++r) points[r].push_back(col[r]);
        }
        env[s.var] = std::make_shared<const MockKernel::Labels>(kmeans(points, k, kKernelKMeansIterations));
    }

    void operator()(const KnnGraph& s) {
        auto t = lookup_table(env, s.source);
        auto p = std::make_shared<PlotExtract>();
        p->kind = PlotKind::NodeLink3D;
        p->axis_names = s.columns;
        p->points = plot_points(*t, s.columns);
        p->knn_k = resolve_k(env, s.k);
        p->edges = knn_graph(p->points, p->knn_k);
        p->colors = resolve_colors(env, s.color, p->points.size());
        display = std::move(p);
    }

    void operator()(const ParamDecl& s) { env[s.name] = s.value; }

    void operator()(const Opaque&) {}
};

ojson kernel_value_to_json(const MockKernel::KernelValue& v) {
    if (const auto* t = std::get_if<TablePtr>(&v)) {
        return {{"type", "table"}, {"table", table_to_json(**t)}};
    }
    if (const auto* d = std::get_if<double>(&v)) {
        return {{"type", "number"}, {"value", number_to_json(*d)}};
    }
    return {{"type", "labels"}, {"labels", *std::get<std::shared_ptr<const MockKernel::Labels>>(v)}};
}

MockKernel::KernelValue kernel_value_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "table") return std::make_shared<const TableExtract>(table_from_json(j.at("table")));
    if (type == "number") return number_from_json(j.at("value"));
    if (type == "labels") return std::make_shared<const MockKernel::Labels>(j.at("labels").get<MockKernel::Labels>());
    fail(ErrorCode::SchemaError, "unknown kernel value type '" + type + "'");
}

}  // namespace

ExecResult MockKernel::execute(std::string_view cell_id, std::string_view source) {
    ExecResult result;
    result.cell_id = std::string(cell_id);
    const CellAst ast = parse_source(source);
    Env env = env_;
    std::shared_ptr<const PlotExtract> display;
    try {
        Interpreter run{env, display};
        for (const auto& stmt : ast.statements) std::visit(run, stmt);
    } catch (const Error& e) {
        result.ok = false;
        result.error = e.what();
        return result;
    }
    env_ = std::move(env);
    if (display) {
        result.display = DisplayDescriptor{display->kind, display->axis_names, display->points.size()};
        displays_[std::string(cell_id)] = std::move(display);
    } else {
        displays_.erase(std::string(cell_id));
    }
    result.defined_vars = defined_variables(ast);
    return result;
}

std::shared_ptr<const TableExtract> MockKernel::extract_table(std::string_view var) const {
    auto it = env_.find(var);
    if (it == env_.end()) {
        fail(ErrorCode::UnknownVariable, "unknown variable '" + std::string(var) + "'");
    }
    if (const auto* t = std::get_if<TablePtr>(&it->second)) return *t;
    fail(ErrorCode::NotTabular, "variable '" + std::string(var) + "' is not tabular");
}

std::shared_ptr<const PlotExtract> MockKernel::extract_plot(std::string_view cell_id) const {
    auto it = displays_.find(cell_id);
    if (it == displays_.end()) {
        fail(ErrorCode::NotExecuted, "cell '" + std::string(cell_id) + "' has no plot output");
    }
    return it->second;
}

void MockKernel::reset() {
    env_.clear();
    displays_.clear();
}

std::unique_ptr<KernelBackend> MockKernel::clone() const { return std::make_unique<MockKernel>(*this); }

std::string MockKernel::digest() const { return fnv1a_hex(snapshot().dump()); }

ojson MockKernel::snapshot() const {
    ojson env = ojson::object();
    for (const auto& [name, v] : env_) env[name] = kernel_value_to_json(v);
    ojson displays = ojson::object();
    for (const auto& [cell, p] : displays_) displays[cell] = plot_to_json(*p);
    return {{"env", std::move(env)}, {"displays", std::move(displays)}};
}

void MockKernel::restore(const nlohmann::json& snapshot) {
    Env env;
    std::map<std::string, std::shared_ptr<const PlotExtract>, std::less<>> displays;
    for (const auto& [name, v] : snapshot.at("env").items()) env[name] = kernel_value_from_json(v);
    for (const auto& [cell, p] : snapshot.at("displays").items()) {
        displays[cell] = std::make_shared<const PlotExtract>(plot_from_json(p));
    }
    env_ = std::move(env);
    displays_ = std::move(displays);
}

}  // namespace icon
