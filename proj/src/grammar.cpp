#include "icon/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace icon {

namespace {

struct Token {
    enum class Kind { Ident, Number, String, Punct, Comment };
    Kind kind;
    std::string text;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::optional<std::vector<Token>> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        const char c = line[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '#') {
            out.push_back({Token::Kind::Comment, std::string(line.substr(i + 1))});
            break;
        }
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < n && is_ident_char(line[j])) ++j;
            out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i))});
            i = j;
            continue;
        }
        const bool starts_number = is_digit(c) || (c == '.' && i + 1 < n && is_digit(line[i + 1])) ||
                                   (c == '-' && i + 1 < n && (is_digit(line[i + 1]) || line[i + 1] == '.'));
        if (starts_number) {
            std::size_t j = i;
            if (line[j] == '-') ++j;
            while (j < n && is_digit(line[j])) ++j;
            if (j < n && line[j] == '.' && !(j + 1 < n && line[j + 1] == '.')) {
                ++j;
                while (j < n && is_digit(line[j])) ++j;
            }
            if (j < n && (line[j] == 'e' || line[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (line[k] == '+' || line[k] == '-')) ++k;
                if (k < n && is_digit(line[k])) {
                    while (k < n && is_digit(line[k])) ++k;
                    j = k;
                }
            }
            out.push_back({Token::Kind::Number, std::string(line.substr(i, j - i))});
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < n) {
                const char d = line[j];
                if (d == c) {
                    closed = true;
                    ++j;
                    break;
                }
                if (d == '\\') {
                    if (j + 1 >= n) return std::nullopt;
                    const char e = line[j + 1];
                    switch (e) {
                        case 'n': value += '\n'; j += 2; break;
                        case 't': value += '\t'; j += 2; break;
                        case 'r': value += '\r'; j += 2; break;
                        case '\\': value += '\\'; j += 2; break;
                        case '"': value += '"'; j += 2; break;
                        case '\'': value += '\''; j += 2; break;
                        case 'x': {
                            if (j + 3 >= n) return std::nullopt;
                            const int hi = hex_value(line[j + 2]);
                            const int lo = hex_value(line[j + 3]);
                            if (hi < 0 || lo < 0) return std::nullopt;
                            value += static_cast<char>(hi * 16 + lo);
                            j += 4;
                            break;
                        }
                        default: return std::nullopt;
                    }
                    continue;
                }
                value += d;
                ++j;
            }
            if (!closed) return std::nullopt;
            out.push_back({Token::Kind::String, std::move(value)});
            i = j;
            continue;
        }
        if (i + 1 < n) {
            const std::string_view two = line.substr(i, 2);
            if (two == "<=" || two == ">=" || two == "==" || two == "!=") {
                out.push_back({Token::Kind::Punct, std::string(two)});
                i += 2;
                continue;
            }
        }
        if (std::string_view("=<>()[]{},.:").find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c)});
            ++i;
            continue;
        }
        return std::nullopt;
    }
    return out;
}

class Cursor {
public:
    explicit Cursor(const std::vector<Token>& toks) : toks_(toks) {}

    [[nodiscard]] bool done() const { return pos_ == toks_.size(); }

    [[nodiscard]] const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
    }

    bool punct(std::string_view p) {
        const Token* t = peek();
        if (t && t->kind == Token::Kind::Punct && t->text == p) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool keyword(std::string_view word) {
        const Token* t = peek();
        if (t && t->kind == Token::Kind::Ident && t->text == word) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::optional<std::string> ident() { return take(Token::Kind::Ident); }
    std::optional<std::string> string() { return take(Token::Kind::String); }
    std::optional<std::string> number() { return take(Token::Kind::Number); }
    std::optional<std::string> comment() { return take(Token::Kind::Comment); }

    [[nodiscard]] std::size_t mark() const { return pos_; }
    void reset(std::size_t m) { pos_ = m; }

private:
    std::optional<std::string> take(Token::Kind kind) {
        const Token* t = peek();
        if (t && t->kind == kind) {
            ++pos_;
            return t->text;
        }
        return std::nullopt;
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
};

std::optional<std::int64_t> parse_int(std::string_view text) {
    std::int64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return v;
}

// number | float("nan"|"inf"|"-inf")
std::optional<double> parse_number(Cursor& cur) {
    if (auto num = cur.number()) {
        return parse_decimal(*num);
    }
    const auto m = cur.mark();
    if (cur.keyword("float") && cur.punct("(")) {
        auto s = cur.string();
        if (s && cur.punct(")")) {
            if (*s == "nan") return std::nan("");
            if (*s == "inf") return HUGE_VAL;
            if (*s == "-inf") return -HUGE_VAL;
        }
    }
    cur.reset(m);
    return std::nullopt;
}

std::optional<Value> parse_value(Cursor& cur) {
    if (auto s = cur.string()) {
        return Value{*s};
    }
    if (auto d = parse_number(cur)) {
        return Value{*d};
    }
    return std::nullopt;
}

std::optional<IntArg> parse_int_arg(Cursor& cur) {
    if (auto num = cur.number()) {
        if (auto v = parse_int(*num)) return IntArg{*v};
        return std::nullopt;
    }
    if (auto id = cur.ident()) {
        return IntArg{*id};
    }
    return std::nullopt;
}

std::optional<ColorSource> parse_color(Cursor& cur) {
    if (cur.punct("[")) {
        std::vector<std::int64_t> labels;
        if (cur.punct("]")) return ColorSource{labels};
        while (true) {
            auto num = cur.number();
            if (!num) return std::nullopt;
            auto v = parse_int(*num);
            if (!v) return std::nullopt;
            labels.push_back(*v);
            if (cur.punct("]")) break;
            if (!cur.punct(",")) return std::nullopt;
        }
        return ColorSource{std::move(labels)};
    }
    if (auto id = cur.ident()) {
        return ColorSource{*id};
    }
    return std::nullopt;
}

// SRC["col"]; `source` is fixed by the first reference and every later one must agree.
bool parse_column_ref(Cursor& cur, std::string& source, std::vector<std::string>& columns) {
    auto src = cur.ident();
    if (!src) return false;
    if (source.empty()) {
        source = *src;
    } else if (source != *src) {
        return false;
    }
    if (!cur.punct("[")) return false;
    auto col = cur.string();
    if (!col || !cur.punct("]")) return false;
    columns.push_back(*col);
    return true;
}

// Trailing `, c=COLOR` then ')'.
bool parse_plot_tail(Cursor& cur, ColorSource& color) {
    if (cur.punct(")")) return true;
    if (!cur.punct(",") || !cur.keyword("c") || !cur.punct("=")) return false;
    auto c = parse_color(cur);
    if (!c) return false;
    color = std::move(*c);
    return cur.punct(")");
}

std::optional<Statement> parse_scatter(Cursor& cur) {
    if (!(cur.keyword("plt") || cur.keyword("ax"))) return std::nullopt;
    if (!cur.punct(".") || !cur.keyword("scatter") || !cur.punct("(")) return std::nullopt;
    PlotScatter plot;
    if (!parse_column_ref(cur, plot.source, plot.columns)) return std::nullopt;
    while (plot.columns.size() < 3) {
        const auto m = cur.mark();
        if (!cur.punct(",")) break;
        if (!parse_column_ref(cur, plot.source, plot.columns)) {
            cur.reset(m);
            break;
        }
    }
    if (plot.columns.size() < 2) return std::nullopt;
    if (!parse_plot_tail(cur, plot.color)) return std::nullopt;
    return plot;
}

std::optional<Statement> parse_knn(Cursor& cur) {
    if (!cur.keyword("knn_graph") || !cur.punct("(")) return std::nullopt;
    KnnGraph g;
    for (int i = 0; i < 3; ++i) {
        if (i > 0 && !cur.punct(",")) return std::nullopt;
        if (!parse_column_ref(cur, g.source, g.columns)) return std::nullopt;
    }
    if (!cur.punct(",") || !cur.keyword("k") || !cur.punct("=")) return std::nullopt;
    auto k = parse_int_arg(cur);
    if (!k) return std::nullopt;
    g.k = *k;
    if (!parse_plot_tail(cur, g.color)) return std::nullopt;
    return g;
}

std::optional<std::pair<double, double>> parse_range_comment(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    constexpr std::string_view prefix = "range:";
    if (!text.starts_with(prefix)) return std::nullopt;
    text = trim(text.substr(prefix.size()));
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) return std::nullopt;
    auto lo = parse_decimal(trim(text.substr(0, sep)));
    auto hi = parse_decimal(trim(text.substr(sep + 2)));
    if (!lo || !hi) return std::nullopt;
    return std::pair{*lo, *hi};
}

std::optional<TableLiteral> parse_table_literal(Cursor& cur) {
    if (!cur.keyword("pd") || !cur.punct(".") || !cur.keyword("DataFrame") || !cur.punct("(") || !cur.punct("{")) {
        return std::nullopt;
    }
    TableLiteral lit;
    if (!cur.punct("}")) {
        while (true) {
            LiteralColumn col;
            auto name = cur.string();
            if (!name || !cur.punct(":")) return std::nullopt;
            col.name = *name;
            if (!cur.keyword("pd") || !cur.punct(".") || !cur.keyword("Series") || !cur.punct("(") ||
                !cur.punct("[")) {
                return std::nullopt;
            }
            if (!cur.punct("]")) {
                while (true) {
                    auto v = parse_value(cur);
                    if (!v) return std::nullopt;
                    col.values.push_back(std::move(*v));
                    if (cur.punct("]")) break;
                    if (!cur.punct(",")) return std::nullopt;
                }
            }
            if (!cur.punct(",") || !cur.keyword("dtype") || !cur.punct("=")) return std::nullopt;
            auto dtype = cur.string();
            if (!dtype || !cur.punct(")")) return std::nullopt;
            if (*dtype == "float64") {
                col.dtype = Dtype::Number;
            } else if (*dtype == "object") {
                col.dtype = Dtype::Text;
            } else {
                return std::nullopt;
            }
            const bool consistent = std::all_of(col.values.begin(), col.values.end(), [&](const Value& v) {
                return std::holds_alternative<double>(v) == (col.dtype == Dtype::Number);
            });
            if (!consistent) return std::nullopt;
            lit.columns.push_back(std::move(col));
            if (cur.punct("}")) break;
            if (!cur.punct(",")) return std::nullopt;
        }
    }
    if (!cur.punct(")")) return std::nullopt;
    return lit;
}

std::optional<Statement> parse_binding(Cursor& cur) {
    auto var = cur.ident();
    if (!var || !cur.punct("=")) return std::nullopt;

    {
        const auto m = cur.mark();
        if (auto num = parse_number(cur)) {
            ParamDecl p{*var, *num, std::nullopt};
            if (auto c = cur.comment()) {
                p.range = parse_range_comment(*c);
                if (!p.range) return std::nullopt;
            }
            return p;
        }
        cur.reset(m);
    }

    const Token* head = cur.peek();
    if (!head || head->kind != Token::Kind::Ident) return std::nullopt;

    if (head->text == "load_dataset" && cur.peek(1) && cur.peek(1)->text == "(") {
        cur.keyword("load_dataset");
        cur.punct("(");
        auto name = cur.string();
        if (!name || !cur.punct(")")) return std::nullopt;
        return LoadDataset{*var, *name};
    }
    if (head->text == "kmeans" && cur.peek(1) && cur.peek(1)->text == "(") {
        cur.keyword("kmeans");
        cur.punct("(");
        auto src = cur.ident();
        if (!src || !cur.punct(",")) return std::nullopt;
        auto k = parse_int_arg(cur);
        if (!k || !cur.punct(")")) return std::nullopt;
        return KMeans{*var, *src, *k};
    }
    if (head->text == "pd" && cur.peek(1) && cur.peek(1)->text == ".") {
        auto lit = parse_table_literal(cur);
        if (!lit) return std::nullopt;
        return Assign{*var, std::move(*lit)};
    }

    auto src = cur.ident();
    if (cur.done()) {
        return Assign{*var, *src};
    }
    if (!cur.punct("[")) return std::nullopt;

    if (cur.punct("[")) {
        SelectCols sel{*var, *src, {}};
        while (true) {
            auto col = cur.string();
            if (!col) return std::nullopt;
            sel.columns.push_back(*col);
            if (cur.punct("]")) break;
            if (!cur.punct(",")) return std::nullopt;
        }
        if (!cur.punct("]")) return std::nullopt;
        return sel;
    }

    FilterExpr f{*var, *src, {}, Comparator::Less, Value{0.0}};
    auto inner = cur.ident();
    if (!inner || *inner != *src || !cur.punct("[")) return std::nullopt;
    auto col = cur.string();
    if (!col || !cur.punct("]")) return std::nullopt;
    f.column = *col;
    const Token* op = cur.peek();
    if (!op || op->kind != Token::Kind::Punct || op->text == "=") return std::nullopt;
    auto cmp = comparator_from_string(op->text);
    if (!cmp) return std::nullopt;
    cur.punct(op->text);
    f.op = *cmp;
    auto thr = parse_value(cur);
    if (!thr || !cur.punct("]")) return std::nullopt;
    f.threshold = std::move(*thr);
    return f;
}

std::string render_value(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return float_literal(*d);
    }
    return quote(std::get<std::string>(v));
}

std::string render_number(double v) { return std::isfinite(v) ? shortest_decimal(v) : float_literal(v); }

std::string render_int_arg(const IntArg& k) {
    if (const auto* i = std::get_if<std::int64_t>(&k)) {
        return std::to_string(*i);
    }
    return std::get<std::string>(k);
}

std::string render_color(const ColorSource& color) {
    if (std::holds_alternative<std::monostate>(color)) {
        return {};
    }
    if (const auto* name = std::get_if<std::string>(&color)) {
        return ", c=" + *name;
    }
    std::string out = ", c=[";
    const auto& labels = std::get<std::vector<std::int64_t>>(color);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(labels[i]);
    }
    return out + "]";
}

std::string render_column_refs(const std::string& source, const std::vector<std::string>& columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out += ", ";
        out += source + "[" + quote(columns[i]) + "]";
    }
    return out;
}

struct Renderer {
    std::string operator()(const LoadDataset& s) const { return s.var + " = load_dataset(" + quote(s.dataset) + ")"; }

    std::string operator()(const Assign& s) const {
        if (const auto* src = std::get_if<std::string>(&s.expr)) {
            return s.var + " = " + *src;
        }
        const auto& lit = std::get<TableLiteral>(s.expr);
        std::string out = s.var + " = pd.DataFrame({";
        for (std::size_t c = 0; c < lit.columns.size(); ++c) {
            const auto& col = lit.columns[c];
            if (c > 0) out += ", ";
            out += quote(col.name) + ": pd.Series([";
            for (std::size_t i = 0; i < col.values.size(); ++i) {
                if (i > 0) out += ", ";
                out += render_value(col.values[i]);
            }
            out += col.dtype == Dtype::Number ? "], dtype=\"float64\")" : "], dtype=\"object\")";
        }
        return out + "})";
    }

    std::string operator()(const FilterExpr& s) const {
        return s.var + " = " + s.source + "[" + s.source + "[" + quote(s.column) + "] " +
               std::string(to_string(s.op)) + " " + render_value(s.threshold) + "]";
    }

    std::string operator()(const SelectCols& s) const {
        std::string out = s.var + " = " + s.source + "[[";
        for (std::size_t i = 0; i < s.columns.size(); ++i) {
            if (i > 0) out += ", ";
            out += quote(s.columns[i]);
        }
        return out + "]]";
    }

    std::string operator()(const PlotScatter& s) const {
        const char* head = s.columns.size() == 3 ? "ax.scatter(" : "plt.scatter(";
        return head + render_column_refs(s.source, s.columns) + render_color(s.color) + ")";
    }

    std::string operator()(const KMeans& s) const {
        return s.var + " = kmeans(" + s.source + ", " + render_int_arg(s.k) + ")";
    }

    std::string operator()(const KnnGraph& s) const {
        return "knn_graph(" + render_column_refs(s.source, s.columns) + ", k=" + render_int_arg(s.k) +
               render_color(s.color) + ")";
    }

    std::string operator()(const ParamDecl& s) const {
        std::string out = s.name + " = " + render_number(s.value);
        if (s.range) {
            out += "  # range: " + render_number(s.range->first) + ".." + render_number(s.range->second);
        }
        return out;
    }

    std::string operator()(const Opaque& s) const { return s.text; }
};

}  // namespace

Statement parse_line(std::string_view line) {
    auto tokens = tokenize(line);
    if (!tokens || tokens->empty()) {
        return Opaque{std::string(line)};
    }
    Cursor cur(*tokens);
    std::optional<Statement> stmt;
    const Token& first = tokens->front();
    if (first.kind == Token::Kind::Ident && (first.text == "plt" || first.text == "ax")) {
        stmt = parse_scatter(cur);
    } else if (first.kind == Token::Kind::Ident && first.text == "knn_graph") {
        stmt = parse_knn(cur);
    } else {
        stmt = parse_binding(cur);
    }
    if (!stmt || !cur.done()) {
        return Opaque{std::string(line)};
    }
    return std::move(*stmt);
}

CellAst parse_source(std::string_view source) {
    CellAst ast;
    if (source.empty()) {
        return ast;
    }
    std::size_t start = 0;
    while (true) {
        const auto nl = source.find('\n', start);
        if (nl == std::string_view::npos) {
            ast.statements.push_back(parse_line(source.substr(start)));
            break;
        }
        ast.statements.push_back(parse_line(source.substr(start, nl - start)));
        start = nl + 1;
    }
    return ast;
}

std::string render(const Statement& stmt) { return std::visit(Renderer{}, stmt); }

std::string render(const CellAst& ast) {
    std::string out;
    for (std::size_t i = 0; i < ast.statements.size(); ++i) {
        if (i > 0) out += '\n';
        out += render(ast.statements[i]);
    }
    return out;
}

std::optional<std::string> defined_variable(const Statement& stmt) {
    return std::visit(
        [](const auto& s) -> std::optional<std::string> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ParamDecl>) {
                return s.name;
            } else if constexpr (requires { s.var; }) {
                return s.var;
            } else {
                return std::nullopt;
            }
        },
        stmt);
}

std::vector<std::string> defined_variables(const CellAst& ast) {
    std::vector<std::string> out;
    for (const auto& stmt : ast.statements) {
        if (auto v = defined_variable(stmt); v && std::find(out.begin(), out.end(), *v) == out.end()) {
            out.push_back(*v);
        }
    }
    return out;
}

std::vector<std::string> mentioned_names(const Statement& stmt) {
    std::vector<std::string> out;
    if (auto v = defined_variable(stmt)) {
        out.push_back(*v);
    }
    auto add_color = [&](const ColorSource& c) {
        if (const auto* name = std::get_if<std::string>(&c)) out.push_back(*name);
    };
    auto add_k = [&](const IntArg& k) {
        if (const auto* name = std::get_if<std::string>(&k)) out.push_back(*name);
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Assign>) {
                if (const auto* src = std::get_if<std::string>(&s.expr)) out.push_back(*src);
            } else if constexpr (std::is_same_v<T, FilterExpr> || std::is_same_v<T, SelectCols>) {
                out.push_back(s.source);
            } else if constexpr (std::is_same_v<T, PlotScatter>) {
                out.push_back(s.source);
                add_color(s.color);
            } else if constexpr (std::is_same_v<T, KMeans>) {
                out.push_back(s.source);
                add_k(s.k);
            } else if constexpr (std::is_same_v<T, KnnGraph>) {
                out.push_back(s.source);
                add_k(s.k);
                add_color(s.color);
            }
        },
        stmt);
    return out;
}

std::string quote(std::string_view text) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "\"";
    for (const char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: {
                const auto u = static_cast<unsigned char>(c);
                if (u < 0x20 || u == 0x7f) {
                    out += "\\x";
                    out += hex[u >> 4];
                    out += hex[u & 0xf];
                } else {
                    out += c;
                }
            }
        }
    }
    return out + "\"";
}

std::string_view to_string(Comparator op) noexcept {
    switch (op) {
        case Comparator::Less: return "<";
        case Comparator::LessEq: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEq: return ">=";
        case Comparator::Equal: return "==";
        case Comparator::NotEqual: return "!=";
    }
    return "<";
}

std::optional<Comparator> comparator_from_string(std::string_view s) noexcept {
    if (s == "<") return Comparator::Less;
    if (s == "<=" || s == "≤") return Comparator::LessEq;
    if (s == ">") return Comparator::Greater;
    if (s == ">=" || s == "≥") return Comparator::GreaterEq;
    if (s == "==" || s == "=") return Comparator::Equal;
    if (s == "!=" || s == "≠") return Comparator::NotEqual;
    return std::nullopt;
}

bool is_identifier(std::string_view s) noexcept {
    if (s.empty() || !is_ident_start(s.front())) return false;
    return std::all_of(s.begin(), s.end(), is_ident_char);
}

}  // namespace icon
