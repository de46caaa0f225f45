#include <gtest/gtest.h>

#include <sstream>

#include "fuzz.hpp"
#include "icon/engine.hpp"
#include "icon/wire.hpp"
#include "support.hpp"

namespace icon {
namespace {

std::vector<ojson> converse(const std::string& input) {
    MockKernel kernel;
    std::istringstream in(input);
    std::ostringstream out;
    serve_kernel(in, out, kernel);
    std::vector<ojson> lines;
    std::istringstream replies(out.str());
    for (std::string line; std::getline(replies, line);) lines.push_back(ojson::parse(line));
    return lines;
}

TEST(WireProtocol, RequestsAndFailures) {
    const auto r = converse(
        R"J({"id":1,"op":"execute","cell_id":"c1","source":"df = load_dataset(\"wine\")"})J"
        "\n"
        R"({"id":2,"op":"extract_table","var":"df"})"
        "\n\n"
        R"J({"id":3,"op":"execute","cell_id":"c2","source":"plt.scatter(df[\"alcohol\"], df[\"hue\"])"})J"
        "\n"
        R"({"id":4,"op":"extract_plot","cell_id":"c2"})"
        "\n"
        R"({"id":5,"op":"reset"})"
        "\n"
        R"({"id":6,"op":"extract_table","var":"df"})"
        "\n"
        R"({"id":7,"op":"launch"})"
        "\n"
        "not json\n"
        R"({"id":"x","op":"execute","cell_id":"c3","source":"y = nothing"})"
        "\n");
    ASSERT_EQ(r.size(), 9u);
    EXPECT_EQ(r[0].dump(), R"({"id":1,"ok":true,"cell_id":"c1","status":"ok","defined_vars":["df"]})");
    const auto table = table_from_json(r[1].at("table"));
    EXPECT_EQ(table.row_count(), 178u);
    EXPECT_EQ(table.columns.size(), 13u);
    EXPECT_EQ(r[2].at("display").at("kind"), "Scatter2D");
    EXPECT_EQ(plot_from_json(r[3].at("plot")).points.size(), 178u);
    EXPECT_EQ(r[4].dump(), R"({"id":5,"ok":true})");
    EXPECT_EQ(r[5].at("code"), "UnknownVariable");
    EXPECT_EQ(r[5].at("ok"), false);
    EXPECT_EQ(r[6].at("code"), "ProtocolError");
    EXPECT_TRUE(r[7].at("id").is_null());
    // A failing cell is a successful request carrying an error status.
    EXPECT_EQ(r[8].at("id"), "x");
    EXPECT_EQ(r[8].at("ok"), true);
    EXPECT_EQ(r[8].at("status"), "error");
    EXPECT_TRUE(r[8].at("defined_vars").empty());
}

TEST(WireProtocol, NumbersRoundTripExactly) {
    test::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto t = test::random_table(rng, 6, 4, false);
        EXPECT_TRUE(identical(table_from_json(nlohmann::json::parse(table_to_json(t).dump())), t));
    }
}

std::unique_ptr<ProcessKernel> launch_cli_kernel() { return ProcessKernel::launch({ICON_CLI, "kernel"}); }

TEST(ProcessKernel, MatchesBuiltInKernel) {
    auto remote = launch_cli_kernel();
    MockKernel local;
    const std::vector<std::pair<std::string, std::string>> cells{
        {"a", R"(iris = load_dataset("iris"))"},
        {"b", "k = 3"},
        {"c", "labels = kmeans(iris, k)"},
        {"d", R"J(knn_graph(iris["sepal length (cm)"], iris["sepal width (cm)"], iris["petal length (cm)"], k=2, c=labels))J"},
        {"e", "broken = missing"},
    };
    for (const auto& [id, src] : cells) EXPECT_EQ(remote->execute(id, src), local.execute(id, src)) << id;
    EXPECT_TRUE(identical(*remote->extract_table("iris"), *local.extract_table("iris")));
    EXPECT_TRUE(identical(*remote->extract_plot("d"), *local.extract_plot("d")));
    EXPECT_EQ(test::error_code_of([&] { (void)remote->extract_table("k"); }), ErrorCode::NotTabular);
    EXPECT_EQ(test::error_code_of([&] { (void)remote->extract_plot("a"); }), ErrorCode::NotExecuted);
    EXPECT_TRUE(remote->warning().empty());
}

TEST(ProcessKernel, DiscardedCloneDoesNotLeak) {
    auto live = launch_cli_kernel();
    live->execute("a", "x = 1");
    {
        auto scratch = live->clone();
        scratch->execute("b", R"(t = load_dataset("wine"))");
        EXPECT_EQ(scratch->extract_table("t")->row_count(), 178u);
    }
    // The process saw the clone's work; the live instance must not.
    EXPECT_EQ(test::error_code_of([&] { (void)live->extract_table("t"); }), ErrorCode::UnknownVariable);
    auto kept = live->clone();
    kept->execute("b", R"(t = load_dataset("iris"))");
    EXPECT_EQ(kept->extract_table("t")->row_count(), 150u);
    EXPECT_NE(kept->digest(), live->digest());
}

TEST(ProcessKernel, FallsBackWhenTheProcessDies) {
    auto k = ProcessKernel::launch({"/bin/true"});
    const auto r = k->execute("a", R"(w = load_dataset("wine"))");
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(k->on_fallback());
    EXPECT_NE(k->warning().find("built-in kernel"), std::string::npos);
    EXPECT_EQ(k->extract_table("w")->row_count(), 178u);
}

TEST(ProcessKernel, GarbageAnswersFallBack) {
    auto k = ProcessKernel::launch({"/bin/cat"});
    EXPECT_TRUE(k->execute("a", "x = 2").ok);
    EXPECT_TRUE(k->on_fallback());
}

TEST(ProcessKernel, MissingProgramIsAnIoError) {
    EXPECT_EQ(test::error_code_of([] { (void)ProcessKernel::launch({"/nonexistent/kernel"}); }), ErrorCode::IoError);
}

TEST(ProcessKernel, SnapshotRestoresJournal) {
    auto a = launch_cli_kernel();
    a->execute("a", R"(w = load_dataset("wine"))");
    auto b = launch_cli_kernel();
    b->restore(nlohmann::json::parse(a->snapshot().dump()));
    EXPECT_EQ(b->digest(), a->digest());
    EXPECT_EQ(b->extract_table("w")->row_count(), 178u);
    EXPECT_THROW(b->restore(nlohmann::json::parse(R"({"journal":[["a"]]})")), SchemaError);
}

// The engine behaves identically whichever backend runs the cells.
TEST(ProcessKernel, EngineSessionsAgreeWithBuiltIn) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        test::Rng rng_a(seed), rng_b(seed);
        Engine local(test::study_notebook(), {seed % 2 ? Mode::Separated : Mode::Unified});
        Engine remote(test::study_notebook(), {seed % 2 ? Mode::Separated : Mode::Unified}, launch_cli_kernel());
        test::FuzzReport ra, rb;
        test::fuzz_engine(rng_a, local, 40, ra);
        test::fuzz_engine(rng_b, remote, 40, rb);
        EXPECT_TRUE(rb.violations.empty()) << rb.violations.front();
        EXPECT_EQ(log_to_ndjson(remote.log()), log_to_ndjson(local.log()));
        EXPECT_EQ(remote.state(), local.state());
    }
}

}  // namespace
}  // namespace icon
