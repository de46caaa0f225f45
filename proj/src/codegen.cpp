#include "icon/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "icon/error.hpp"

namespace icon {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Every identifier-shaped token in the text, string contents and comments included. Overly
// cautious on purpose: a name that merely appears in a comment is still treated as taken.
void collect_identifiers(std::string_view text, std::set<std::string, std::less<>>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (ident_start(text[i]) && (i == 0 || !ident_char(text[i - 1]))) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            out.emplace(text.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
}

TableExtract axes_table(const PlotExtract& plot) {
    TableExtract t;
    for (const auto& name : plot.axis_names) t.columns.push_back({name, Dtype::Number});
    for (const auto& p : plot.points) t.rows.emplace_back(p.begin(), p.end());
    return t;
}

ColorSource color_literal(const std::vector<std::int64_t>& colors) {
    if (std::all_of(colors.begin(), colors.end(), [](std::int64_t c) { return c == 0; })) {
        return std::monostate{};
    }
    return colors;
}

std::vector<Statement> artifact_statements(const Artifact& artifact, const std::string& var) {
    if (const auto* table = std::get_if<TableArtifact>(&artifact)) {
        return {table_literal_statement(var, table->displayed())};
    }
    const auto& plot = std::get<VisArtifact>(artifact).extract;
    std::vector<Statement> out{table_literal_statement(var, axes_table(plot))};
    if (plot.kind == PlotKind::NodeLink3D) {
        out.emplace_back(KnnGraph{var, plot.axis_names, IntArg(plot.knn_k), color_literal(plot.colors)});
    } else {
        out.emplace_back(PlotScatter{var, plot.axis_names, color_literal(plot.colors)});
    }
    return out;
}

std::string render_lines(const std::vector<Statement>& stmts) { return render(CellAst{stmts}); }

}  // namespace

std::string name_fresh_variable(const Notebook& nb) {
    std::set<std::string, std::less<>> taken;
    for (const auto* cell : nb.cells()) collect_identifiers(cell->source, taken);
    for (std::size_t n = 1;; ++n) {
        std::string name = "df" + std::to_string(n);
        if (!taken.contains(name)) return name;
    }
}

Statement table_literal_statement(const std::string& var, const TableExtract& table) {
    TableLiteral lit;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        LiteralColumn col{table.columns[c].name, table.columns[c].dtype, {}};
        col.values.reserve(table.rows.size());
        for (const auto& row : table.rows) col.values.push_back(row[c]);
        lit.columns.push_back(std::move(col));
    }
    return Assign{var, std::move(lit)};
}

CodegenResult generate_create(const Artifact& artifact, const Notebook& nb, std::string_view target_cell) {
    const Cell& cell = nb.cell(target_cell);
    if (cell.kind != CellKind::Empty) {
        fail(ErrorCode::TargetNotEmpty, "cell '" + cell.id + "' is not empty");
    }
    CodegenResult r;
    r.cell_id = cell.id;
    r.mode = CodegenMode::Create;
    r.variable = name_fresh_variable(nb);
    r.new_source = render_lines(artifact_statements(artifact, r.variable));
    return r;
}

CodegenResult generate_update(const Artifact& artifact, const Notebook& nb, std::string_view origin_cell) {
    const Cell& cell = nb.cell(origin_cell);
    if (artifact_origin_cell(artifact) != cell.id) {
        fail(ErrorCode::OriginMismatch, "artifact '" + artifact_id(artifact) + "' was not pulled from '" + cell.id + "'");
    }
    const CellAst ast = parse_source(cell.source);
    const auto vars = defined_variables(ast);
    const bool is_table = std::holds_alternative<TableArtifact>(artifact);
    if (vars.size() > 1 || (is_table && vars.empty())) {
        fail(ErrorCode::AmbiguousVariable, "cell '" + cell.id + "' defines " + std::to_string(vars.size()) +
                                               " variables; exactly one is needed");
    }
    CodegenResult r;
    r.cell_id = cell.id;
    r.mode = CodegenMode::Update;
    r.variable = vars.empty() ? name_fresh_variable(nb) : vars.front();
    std::vector<Statement> stmts;
    for (const auto& s : ast.statements) {
        if (std::holds_alternative<Opaque>(s)) stmts.push_back(s);
    }
    for (auto& s : artifact_statements(artifact, r.variable)) stmts.push_back(std::move(s));
    r.new_source = render_lines(stmts);
    return r;
}

std::string_view to_string(CodegenMode m) noexcept { return m == CodegenMode::Create ? "Create" : "Update"; }

}  // namespace icon
