#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "icon/error.hpp"
#include "icon/notebook.hpp"
#include "support.hpp"

namespace icon {
namespace {

TEST(Fixture, FourteenWindowsThirtyCells) {
    const Notebook nb = test::study_notebook();
    EXPECT_EQ(nb.windows.size(), 14u);
    EXPECT_EQ(nb.cell_count(), 30u);
    EXPECT_EQ(nb.cells().front()->id, "c01");
    EXPECT_EQ(nb.cells().back()->id, "c30");
}

TEST(Fixture, ClassificationMatchesHandLabels) {
    const auto labels = test::study_notebook_labels();
    const auto start = std::chrono::steady_clock::now();
    std::size_t total = 0;
    std::size_t agree = 0;
    for (const auto& w : labels.at("windows")) {
        for (const auto& c : w.at("cells")) {
            ++total;
            const auto expected = cell_kind_from_string(c.at("kind").get<std::string>());
            ASSERT_TRUE(expected.has_value());
            if (classify_cell(c.at("source").get<std::string>()) == *expected) ++agree;
            else ADD_FAILURE() << c.at("id") << " expected " << c.at("kind");
        }
    }
    EXPECT_EQ(total, 30u);
    EXPECT_EQ(agree, total);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(Notebook, CellOrderIsWindowConcatenation) {
    const Notebook nb = test::study_notebook();
    std::vector<std::string> expected;
    for (const auto& w : nb.windows) {
        for (const auto& c : w.cells) expected.push_back(c.id);
    }
    std::vector<std::string> got;
    for (const auto* c : nb.cells()) got.push_back(c->id);
    EXPECT_EQ(got, expected);
}

TEST(EditCell, ParameterEditKeepsKind) {
    Notebook nb = test::study_notebook();
    const auto& c = edit_cell(nb, "c15", "k_means = 5  # range: 2..6");
    EXPECT_EQ(c.kind, CellKind::Code);
    EXPECT_TRUE(c.dirty);
}

TEST(EditCell, EmptyBecomesData) {
    Notebook nb = test::study_notebook();
    ASSERT_EQ(nb.cell("c04").kind, CellKind::Empty);
    EXPECT_EQ(edit_cell(nb, "c04", R"(df = load_dataset("wine"))").kind, CellKind::Data);
}

TEST(EditCell, IdenticalTextStillDirty) {
    Notebook nb = test::study_notebook();
    const std::string src = nb.cell("c03").source;
    ASSERT_FALSE(nb.cell("c03").dirty);
    EXPECT_TRUE(edit_cell(nb, "c03", src).dirty);
}

TEST(EditCell, UnknownCell) {
    Notebook nb = test::study_notebook();
    try {
        (void)edit_cell(nb, "nope", "x = 1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownCell);
    }
}

Notebook with_windows(std::size_t n) {
    Notebook nb;
    nb.id = "n";
    for (std::size_t i = 0; i < n; ++i) nb.windows.push_back({"w" + std::to_string(i), {}, {}});
    return nb;
}

// Angle of a window around the center, measured from the center's facing direction
// (0 = straight ahead, positive toward +x).
double bearing(const Pose& center, const Pose& p) {
    return std::atan2(p.x - center.x, -(p.z - center.z)) - center.yaw;
}

TEST(Layout, SingleWindowAtArcMidpoint) {
    const Pose center{0.0, 1.5, 0.0, 0.0};
    const auto poses = layout_semicircle(with_windows(1), 2.0, center);
    ASSERT_EQ(poses.size(), 1u);
    EXPECT_NEAR(bearing(center, poses[0]), 0.0, 1e-12);
    EXPECT_NEAR(distance(center, poses[0]), 2.0, 1e-12);
}

TEST(Layout, ThreeWindowsSpanTheArc) {
    const Pose center{0.0, 0.0, 0.0, 0.0};
    const auto poses = layout_semicircle(with_windows(3), 2.0, center);
    const double deg = std::numbers::pi / 180.0;
    EXPECT_NEAR(bearing(center, poses[0]), -90 * deg, 1e-12);
    EXPECT_NEAR(bearing(center, poses[1]), 0.0, 1e-12);
    EXPECT_NEAR(bearing(center, poses[2]), 90 * deg, 1e-12);
}

TEST(Layout, FourteenWindowsEvenGapsFacingCenter) {
    const Pose center{0.3, 1.5, -0.2, 0.4};
    const auto poses = layout_semicircle(with_windows(14), 2.0, center);
    ASSERT_EQ(poses.size(), 14u);
    const double gap = std::numbers::pi / 13.0;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        EXPECT_NEAR(distance(center, poses[i]), 2.0, 1e-12);
        if (i > 0) {
            EXPECT_NEAR(bearing(center, poses[i]) - bearing(center, poses[i - 1]), gap, 1e-12);
        }
        // Facing back toward the center.
        const auto f = forward(poses[i].yaw);
        EXPECT_NEAR(poses[i].x + 2.0 * f[0], center.x, 1e-9);
        EXPECT_NEAR(poses[i].z + 2.0 * f[1], center.z, 1e-9);
    }
}

TEST(Layout, DeterministicAndRejectsBadRadius) {
    const auto nb = with_windows(7);
    EXPECT_EQ(layout_semicircle(nb, 1.7, {}), layout_semicircle(nb, 1.7, {}));
    for (double r : {0.0, -1.0, std::nan("")}) {
        try {
            (void)layout_semicircle(nb, r, {});
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NonPositiveRadius);
        }
    }
}

TEST(NotebookFile, RoundTripsAndRecomputesKind) {
    const Notebook nb = test::study_notebook();
    const Notebook back = parse_notebook(notebook_to_json(nb).dump());
    EXPECT_EQ(back, nb);
    const auto lying = R"J({"id":"n","dialect":"python","windows":[{"id":"w","pose":{"x":0,"y":0,"z":0,"yaw":0},
        "cells":[{"id":"c","source":"x = load_dataset(\"wine\")","kind":"Empty"}]}]})J";
    EXPECT_EQ(parse_notebook(lying).cell("c").kind, CellKind::Data);
}

TEST(NotebookFile, SchemaErrorsCarryLocation) {
    const std::string broken = "{\n  \"id\": \"n\",\n  \"windows\": [\n    {\"id\": \"w\",, }\n  ]\n}";
    try {
        (void)parse_notebook(broken, "broken.json");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaError);
        EXPECT_EQ(e.line(), 4u);
        EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos);
    }
    for (const char* bad : {R"({"id":"n","windows":[{"id":"w","pose":{"x":0,"z":0},"cells":[{"id":"c","source":1}]}]})",
                            R"({"id":"n","windows":[{"id":"w","pose":{"x":9,"z":0},"cells":[]}]})",
                            R"({"id":"n","windows":[{"id":"w","pose":{"x":0,"z":0},"cells":[]},{"id":"w","pose":{"x":0,"z":0},"cells":[]}]})",
                            R"({"id":"n","windows":[{"id":"w","pose":{"x":0,"z":0},"cells":[{"id":"c","source":""},{"id":"c","source":""}]}]})",
                            R"([])"}) {
        EXPECT_THROW((void)parse_notebook(bad), SchemaError) << bad;
    }
}

}  // namespace
}  // namespace icon
