#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "icon/cluster.hpp"
#include "icon/datasets.hpp"
#include "icon/error.hpp"
#include "icon/kernel.hpp"
#include "support.hpp"

namespace icon {
namespace {

std::optional<ErrorCode> code_of(auto&& fn) { return test::error_code_of(fn); }

void expect_matches_csv(const TableExtract& t, const std::string& file) {
    const auto oracle = test::read_csv_oracle(test::data_path("datasets/" + file));
    ASSERT_EQ(t.columns.size(), oracle.header.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) EXPECT_EQ(t.columns[c].name, oracle.header[c]);
    ASSERT_EQ(t.rows.size(), oracle.cells.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            ASSERT_TRUE(same_bits(std::get<double>(t.rows[r][c]), std::stod(oracle.cells[r][c]))) << r << "," << c;
        }
    }
}

TEST(Datasets, WineIsFaithfulToTheFile) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c", "df = load_dataset(\"wine\")").ok);
    const auto t = k.extract_table("df");
    EXPECT_EQ(t->row_count(), 178u);
    EXPECT_EQ(t->columns.size(), 13u);
    expect_matches_csv(*t, "wine.csv");
}

TEST(Datasets, IrisIsFaithfulToTheFile) {
    const auto t = builtin_dataset("iris");
    ASSERT_TRUE(t);
    EXPECT_EQ(t->row_count(), 150u);
    EXPECT_EQ(t->columns.size(), 4u);
    expect_matches_csv(*t, "iris.csv");
    EXPECT_EQ(builtin_dataset("titanic"), nullptr);
}

TEST(Datasets, CsvQuotingAndTextColumns) {
    const auto t = parse_csv("a,b\n1,\"x, \"\"y\"\"\"\n2.5,z\n");
    ASSERT_EQ(t.columns.size(), 2u);
    EXPECT_EQ(t.columns[0].dtype, Dtype::Number);
    EXPECT_EQ(t.columns[1].dtype, Dtype::Text);
    EXPECT_EQ(std::get<std::string>(t.rows[0][1]), "x, \"y\"");
}

TEST(Kernel, LoadDefinesVariable) {
    MockKernel k;
    const auto r = k.execute("c1", "df = load_dataset(\"wine\")");
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.defined_vars, std::vector<std::string>{"df"});
    EXPECT_FALSE(r.display);
}

TEST(Kernel, UndefinedVariableIsAnErrorAndLeavesEnvironment) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c1", "a = load_dataset(\"iris\")").ok);
    const auto before = k.digest();
    const auto r = k.execute("c2", "b = load_dataset(\"iris\")\nplt.scatter(nope[\"x\"], nope[\"y\"])");
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.error.find("undefined variable"), std::string::npos) << r.error;
    EXPECT_TRUE(r.defined_vars.empty());
    EXPECT_EQ(k.digest(), before);
    EXPECT_EQ(code_of([&] { (void)k.extract_table("b"); }), ErrorCode::UnknownVariable);
}

TEST(Kernel, LoadFilterScatterYieldsDisplay) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c1", "w = load_dataset(\"wine\")").ok);
    ASSERT_TRUE(k.execute("c2", "s = w[w[\"alcohol\"] >= 13.0]").ok);
    const auto r = k.execute("c3", "plt.scatter(s[\"alcohol\"], s[\"malic_acid\"])");
    ASSERT_TRUE(r.ok);
    ASSERT_TRUE(r.display);

    // Oracle: scan the raw file for qualifying rows.
    const auto csv = test::read_csv_oracle(test::data_path("datasets/wine.csv"));
    const auto col = [&](const std::string& n) {
        return static_cast<std::size_t>(std::find(csv.header.begin(), csv.header.end(), n) - csv.header.begin());
    };
    std::vector<std::vector<double>> expected;
    for (const auto& row : csv.cells) {
        if (std::stod(row[col("alcohol")]) >= 13.0) {
            expected.push_back({std::stod(row[col("alcohol")]), std::stod(row[col("malic_acid")])});
        }
    }
    EXPECT_EQ(r.display->point_count, expected.size());
    EXPECT_EQ(r.display->kind, PlotKind::Scatter2D);
    const auto plot = k.extract_plot("c3");
    EXPECT_EQ(plot->axis_names, (std::vector<std::string>{"alcohol", "malic_acid"}));
    EXPECT_EQ(plot->points, expected);
    EXPECT_TRUE(std::all_of(plot->colors.begin(), plot->colors.end(), [](auto c) { return c == 0; }));
}

TEST(Kernel, FiveRowScatterPairsColumns) {
    MockKernel k;
    const std::string src =
        "t = pd.DataFrame({\"a\": pd.Series([1.0, 2.0, 3.0, 4.0, 5.0], dtype=\"float64\"), "
        "\"b\": pd.Series([5.0, 4.0, 3.0, 2.0, 1.0], dtype=\"float64\")})\nplt.scatter(t[\"a\"], t[\"b\"])";
    ASSERT_TRUE(k.execute("c", src).ok) << k.execute("c", src).error;
    const auto plot = k.extract_plot("c");
    ASSERT_EQ(plot->points.size(), 5u);
    EXPECT_EQ(plot->points[1], (std::vector<double>{2.0, 4.0}));
}

TEST(Kernel, KMeansOneClusterGivesUniformColors) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c1", "i = load_dataset(\"iris\")\nlab = kmeans(i, 1)").ok);
    ASSERT_TRUE(k.execute("c2", "plt.scatter(i[\"sepal length (cm)\"], i[\"sepal width (cm)\"], c=lab)").ok);
    const auto colors = k.extract_plot("c2")->colors;
    ASSERT_EQ(colors.size(), 150u);
    EXPECT_TRUE(std::all_of(colors.begin(), colors.end(), [&](auto c) { return c == colors.front(); }));
}

TEST(Kernel, KnnDisplayOverThreePoints) {
    MockKernel k;
    const std::string src =
        "p = pd.DataFrame({\"x\": pd.Series([0.0, 1.0, 3.0], dtype=\"float64\"), "
        "\"y\": pd.Series([0.0, 0.0, 0.0], dtype=\"float64\"), \"z\": pd.Series([0.0, 0.0, 0.0], "
        "dtype=\"float64\")})\nknn_graph(p[\"x\"], p[\"y\"], p[\"z\"], k=1)";
    const auto r = k.execute("c", src);
    ASSERT_TRUE(r.ok) << r.error;
    const auto plot = k.extract_plot("c");
    EXPECT_EQ(plot->kind, PlotKind::NodeLink3D);
    EXPECT_EQ(plot->edges, (std::vector<Edge>{{0, 1}, {1, 0}, {2, 1}}));
    EXPECT_EQ(plot->knn_k, 1);
}

TEST(Kernel, EmptyTableKeepsColumns) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c", "w = load_dataset(\"wine\")\ne = w[w[\"alcohol\"] > 1000.0]").ok);
    const auto t = k.extract_table("e");
    EXPECT_EQ(t->row_count(), 0u);
    EXPECT_EQ(t->columns.size(), 13u);
}

TEST(Kernel, ExtractErrors) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c", "n = 3").ok);
    EXPECT_EQ(code_of([&] { (void)k.extract_table("n"); }), ErrorCode::NotTabular);
    EXPECT_EQ(code_of([&] { (void)k.extract_table("missing"); }), ErrorCode::UnknownVariable);
    EXPECT_EQ(code_of([&] { (void)k.extract_plot("c"); }), ErrorCode::NotExecuted);
    EXPECT_EQ(code_of([&] { (void)k.extract_plot("never"); }), ErrorCode::NotExecuted);
}

TEST(Kernel, KTooLargeSurfacesAsExecutionError) {
    MockKernel k;
    const auto r = k.execute("c", "i = load_dataset(\"iris\")\nlab = kmeans(i, 151)");
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(r.defined_vars.empty());
}

TEST(Kernel, StudyNotebookRunsDeterministically) {
    const Notebook nb = test::study_notebook();
    MockKernel a, b;
    for (const auto* cell : nb.cells()) {
        EXPECT_EQ(a.execute(cell->id, cell->source), b.execute(cell->id, cell->source)) << cell->id;
    }
    EXPECT_EQ(a.digest(), b.digest());
    const auto pa = a.extract_plot("c19");
    const auto pb = b.extract_plot("c19");
    EXPECT_TRUE(identical(*pa, *pb));
    EXPECT_EQ(pa->edges.size(), 150u * 4u);
}

TEST(Kernel, SnapshotRestoreAndCloneAreFaithful) {
    const Notebook nb = test::study_notebook();
    MockKernel a;
    for (const auto* cell : nb.cells()) (void)a.execute(cell->id, cell->source);
    MockKernel b;
    b.restore(nlohmann::json::parse(a.snapshot().dump()));
    EXPECT_EQ(a.digest(), b.digest());
    EXPECT_TRUE(identical(*a.extract_plot("c22"), *b.extract_plot("c22")));
    auto c = a.clone();
    (void)c->execute("x", "k_means = 5");
    EXPECT_NE(c->digest(), a.digest());
    a.reset();
    EXPECT_TRUE(a.environment().empty());
}

TEST(Kernel, ExecResultJsonRoundTrip) {
    MockKernel k;
    ASSERT_TRUE(k.execute("c1", "i = load_dataset(\"iris\")").ok);
    const auto r = k.execute("c2", "plt.scatter(i[\"sepal length (cm)\"], i[\"petal width (cm)\"])");
    EXPECT_EQ(exec_result_from_json(nlohmann::json::parse(exec_result_to_json(r).dump())), r);
    const auto bad = k.execute("c3", "q = nope");
    EXPECT_EQ(exec_result_from_json(nlohmann::json::parse(exec_result_to_json(bad).dump())), bad);
}

}  // namespace
}  // namespace icon
