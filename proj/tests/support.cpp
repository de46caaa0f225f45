#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "icon/codegen.hpp"
#include "icon/datasets.hpp"
#include "icon/kernel.hpp"

namespace icon::test {

Notebook study_notebook() { return parse_notebook(embedded_file("study_notebook.json"), "study_notebook.json"); }

nlohmann::json study_notebook_labels() {
    std::ifstream in(data_path("fixtures/study_notebook.json"));
    return nlohmann::json::parse(in);
}

std::string data_path(const std::string& relative) { return std::string(ICON_TEST_DATA_DIR) + "/" + relative; }

CsvOracle read_csv_oracle(const std::string& path) {
    std::ifstream in(path);
    CsvOracle out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (first) {
            out.header = fields;
            first = false;
        } else {
            out.cells.push_back(fields);
        }
    }
    return out;
}

namespace {

template <typename T>
T pick(Rng& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

ColorSource random_color(Rng& rng) {
    switch (below(rng, 3)) {
        case 0: return std::monostate{};
        case 1: return random_identifier(rng);
        default: {
            std::vector<std::int64_t> labels(below(rng, 6));
            for (auto& l : labels) l = std::uniform_int_distribution<std::int64_t>(-3, 9)(rng);
            return labels;
        }
    }
}

IntArg random_int_arg(Rng& rng) {
    if (coin(rng)) return random_identifier(rng);
    return std::uniform_int_distribution<std::int64_t>(-5, 1000)(rng);
}

Value random_value(Rng& rng, Dtype dtype, bool allow_special) {
    if (dtype == Dtype::Text) return random_text(rng, 8);
    return random_double(rng, allow_special);
}

std::vector<std::string> distinct_names(Rng& rng, std::size_t n) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        auto name = coin(rng, 0.7) ? random_identifier(rng) : random_text(rng, 10);
        if (seen.insert(name).second) out.push_back(name);
    }
    return out;
}

}  // namespace

std::string random_identifier(Rng& rng) {
    static const std::vector<std::string> pool{"df", "wine", "iris", "x", "y2", "tbl_3", "labels", "k_means",
                                               "_tmp", "strong", "value", "a", "B", "data_frame"};
    if (coin(rng, 0.6)) return pick(rng, pool);
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = first + "0123456789";
    std::string s(1, first[below(rng, first.size())]);
    const auto len = below(rng, 8);
    for (std::size_t i = 0; i < len; ++i) s += rest[below(rng, rest.size())];
    // Words the line dispatcher treats as statement heads.
    if (s == "plt" || s == "ax" || s == "knn_graph" || s == "pd" || s == "float") s += "_v";
    return s;
}

std::string random_text(Rng& rng, std::size_t max_len) {
    static const std::vector<std::string> pieces{"a", "Z", " ", "\"", "'", "\\", "\n", "\t", "\r", "#", "[", "]",
                                                 "(", ")", ",", "=", "<=", "0", "7.5", "é", "\xe2\x89\xa4", "\x01",
                                                 "\x7f", "(cm)", "alcohol"};
    std::string s;
    const auto n = below(rng, max_len + 1);
    for (std::size_t i = 0; i < n; ++i) s += pick(rng, pieces);
    return s;
}

double random_double(Rng& rng, bool allow_special) {
    if (allow_special && coin(rng, 0.08)) {
        static const std::vector<double> special{0.0,
                                                 -0.0,
                                                 std::numeric_limits<double>::infinity(),
                                                 -std::numeric_limits<double>::infinity(),
                                                 std::numeric_limits<double>::quiet_NaN(),
                                                 std::numeric_limits<double>::denorm_min(),
                                                 std::numeric_limits<double>::max(),
                                                 -std::numeric_limits<double>::min()};
        return pick(rng, special);
    }
    switch (below(rng, 4)) {
        case 0: return static_cast<double>(std::uniform_int_distribution<int>(-100, 100)(rng));
        case 1: return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        case 2: return std::ldexp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng),
                                  std::uniform_int_distribution<int>(-300, 300)(rng));
        default: return std::round(std::uniform_real_distribution<double>(0.0, 20.0)(rng) * 100.0) / 100.0;
    }
}

Statement random_statement(Rng& rng) {
    switch (below(rng, 10)) {
        case 0: return LoadDataset{random_identifier(rng), random_text(rng, 6)};
        case 1: return Assign{random_identifier(rng), random_identifier(rng)};
        case 2: {
            TableLiteral lit;
            const auto names = distinct_names(rng, below(rng, 4));
            const auto rows = below(rng, 4);
            for (const auto& name : names) {
                LiteralColumn col{name, coin(rng) ? Dtype::Number : Dtype::Text, {}};
                for (std::size_t r = 0; r < rows; ++r) col.values.push_back(random_value(rng, col.dtype, true));
                lit.columns.push_back(std::move(col));
            }
            return Assign{random_identifier(rng), std::move(lit)};
        }
        case 3: {
            FilterExpr f;
            f.var = random_identifier(rng);
            f.source = random_identifier(rng);
            f.column = random_text(rng, 8);
            f.op = static_cast<Comparator>(below(rng, 6));
            f.threshold = random_value(rng, coin(rng) ? Dtype::Number : Dtype::Text, true);
            return f;
        }
        case 4: {
            SelectCols s{random_identifier(rng), random_identifier(rng), {}};
            const auto n = 1 + below(rng, 4);
            for (std::size_t i = 0; i < n; ++i) s.columns.push_back(random_text(rng, 6));
            return s;
        }
        case 5: {
            PlotScatter p{random_identifier(rng), {}, random_color(rng)};
            const auto n = 2 + below(rng, 2);
            for (std::size_t i = 0; i < n; ++i) p.columns.push_back(random_text(rng, 6));
            return p;
        }
        case 6: return KMeans{random_identifier(rng), random_identifier(rng), random_int_arg(rng)};
        case 7: {
            KnnGraph g{random_identifier(rng), {}, random_int_arg(rng), random_color(rng)};
            for (int i = 0; i < 3; ++i) g.columns.push_back(random_text(rng, 6));
            return g;
        }
        case 8: {
            ParamDecl p{random_identifier(rng), random_double(rng, true), std::nullopt};
            if (coin(rng)) p.range = std::pair{random_double(rng, false), random_double(rng, false)};
            return p;
        }
        default: {
            // Anything the grammar does not recognize, without line breaks.
            while (true) {
                auto text = random_text(rng, 12);
                std::erase(text, '\n');
                if (std::holds_alternative<Opaque>(parse_line(text))) return Opaque{text};
            }
        }
    }
}

CellAst random_ast(Rng& rng, std::size_t max_statements) {
    CellAst ast;
    const auto n = below(rng, max_statements + 1);
    for (std::size_t i = 0; i < n; ++i) ast.statements.push_back(random_statement(rng));
    // A lone empty line renders to the empty source, which parses to no statements at all.
    if (ast.statements.size() == 1 && ast.statements[0] == Statement{Opaque{""}}) ast.statements.clear();
    return ast;
}

TableExtract random_table(Rng& rng, std::size_t max_rows, std::size_t max_cols, bool allow_special) {
    TableExtract t;
    const auto names = distinct_names(rng, 1 + below(rng, std::max<std::size_t>(max_cols, 1)));
    for (const auto& name : names) t.columns.push_back({name, coin(rng, 0.75) ? Dtype::Number : Dtype::Text});
    const auto rows = below(rng, max_rows + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<Value> row;
        for (const auto& c : t.columns) {
            // Repeat earlier values now and then so sorts and filters meet ties.
            if (r > 0 && coin(rng, 0.2)) row.push_back(t.rows[below(rng, r)][row.size()]);
            else row.push_back(random_value(rng, c.dtype, allow_special));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

TableArtifact random_table_artifact(Rng& rng, std::size_t max_rows, std::size_t max_cols) {
    auto base = std::make_shared<const TableExtract>(random_table(rng, max_rows, max_cols));
    TableArtifact t = make_table_artifact("a1", base, std::nullopt, Pose{});
    const auto& cols = base->columns;
    if (cols.empty()) return t;
    const auto edits = below(rng, 5);
    for (std::size_t i = 0; i < edits; ++i) {
        const auto& col = cols[below(rng, cols.size())];
        switch (below(rng, 3)) {
            case 0: t = sort_table(std::move(t), col.name, coin(rng) ? SortDirection::Ascending : SortDirection::Descending); break;
            case 1: {
                const Comparator op = col.dtype == Dtype::Text ? (coin(rng) ? Comparator::Equal : Comparator::NotEqual)
                                                                : static_cast<Comparator>(below(rng, 6));
                Value threshold = !base->rows.empty() && coin(rng, 0.7)
                                      ? base->rows[below(rng, base->rows.size())][*base->column_index(col.name)]
                                      : random_value(rng, col.dtype, false);
                t = filter_rows(std::move(t), col.name, op, threshold);
                break;
            }
            default:
                if (!base->rows.empty()) t.excluded_rows.insert(below(rng, base->rows.size()));
        }
    }
    return t;
}

VisArtifact random_scatter_artifact(Rng& rng, std::size_t max_points) {
    PlotExtract p;
    p.kind = coin(rng) ? PlotKind::Scatter2D : PlotKind::Scatter3D;
    p.axis_names = distinct_names(rng, axis_count(p.kind));
    const auto n = below(rng, max_points + 1);
    const bool colored = coin(rng);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> pt;
        for (std::size_t d = 0; d < p.axis_names.size(); ++d) pt.push_back(random_double(rng, true));
        p.points.push_back(std::move(pt));
        p.colors.push_back(colored ? std::uniform_int_distribution<std::int64_t>(0, 5)(rng) : 0);
    }
    VisArtifact v = make_vis_artifact("a1", std::move(p), std::nullopt, Pose{});
    const auto removals = v.extract.points.empty() ? 0 : below(rng, 3);
    for (std::size_t i = 0; i < removals && !v.extract.points.empty(); ++i) {
        v = remove_point(std::move(v), below(rng, v.extract.points.size()));
    }
    return v;
}

Notebook notebook_of(const std::vector<std::pair<std::string, std::string>>& cells) {
    Notebook nb;
    nb.id = "nb";
    Window w;
    w.id = "w";
    for (const auto& [id, source] : cells) w.cells.push_back(Cell{id, source, classify_cell(source), {}, false});
    nb.windows.push_back(std::move(w));
    return nb;
}

std::string codegen_round_trip_failure(const Artifact& artifact) {
    const Notebook nb = notebook_of({{"target", ""}});
    const auto gen = generate_create(artifact, nb, "target");
    MockKernel kernel;
    const auto run = kernel.execute("target", gen.new_source);
    if (!run.ok) return "execution failed: " + run.error + "\n" + gen.new_source;
    if (const auto* table = std::get_if<TableArtifact>(&artifact)) {
        if (classify_cell(gen.new_source) != CellKind::Data) return "not classified as Data";
        if (!identical(*kernel.extract_table(gen.variable), table->displayed())) return "table differs\n" + gen.new_source;
        return {};
    }
    if (classify_cell(gen.new_source) != CellKind::Visualization) return "not classified as Visualization";
    if (!identical(*kernel.extract_plot("target"), std::get<VisArtifact>(artifact).extract)) {
        return "plot differs\n" + gen.new_source;
    }
    return {};
}

}  // namespace icon::test
