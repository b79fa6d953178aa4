#include <gtest/gtest.h>

#include <cmath>

#include "fxchess/netspec.hpp"

using namespace fxchess;

TEST(Scaling, UnitFactorsKeepBase) {
    const auto d = scaled_dimensions({1.0, 1.0, 1.0, 1.0});
    EXPECT_EQ(d.depth, 10);
    EXPECT_EQ(d.channels, 192);
    const auto z = scaled_dimensions({1.7, 1.3, 1.0, 0.0});
    EXPECT_EQ(z.depth, 10);
    EXPECT_EQ(z.channels, 192);
}

TEST(Scaling, InvalidFactorsThrow) {
    EXPECT_THROW(scaled_dimensions({0.9, 1.0, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(scaled_dimensions({1.0, 0.5, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(scaled_dimensions({1.0, 1.0, 2.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(scaled_dimensions({1.0, 1.0, 1.0, -1.0}), std::invalid_argument);
}

TEST(Scaling, AdjustedGridRows) {
    for (const auto& row : scaling_grid_adjusted()) {
        const auto d = scaled_dimensions(row.params);
        EXPECT_EQ(d.depth, row.depth) << row.params.alpha;
        EXPECT_LE(std::abs(d.channels - row.channels), 1) << row.params.alpha;
        EXPECT_TRUE(check_adjusted_criterion(row.params, 1e-9)) << row.params.alpha;
    }
}

TEST(Scaling, OriginalGridRows) {
    for (const auto& row : scaling_grid_original()) {
        const auto d = scaled_dimensions(row.params);
        EXPECT_EQ(d.depth, row.depth);
        EXPECT_LE(std::abs(d.channels - row.channels), 1);
        EXPECT_TRUE(check_original_criterion(row.params, 1e-9));
        if (row.params.alpha != 2.0) {
            EXPECT_FALSE(check_adjusted_criterion(row.params, 1e-6));
        }
    }
}

TEST(Scaling, HandComputedRow) {
    // alpha = 1.8, beta = (10/9)^(5/8) ~ 1.06807, channels = 192 * 1.06807 = 205.07
    const ScalingParams p{1.8, std::pow(10.0 / 9.0, 0.625), 1.0, 1.0};
    EXPECT_NEAR(p.beta, 1.06807, 1e-5);
    EXPECT_EQ(scaled_dimensions(p).channels, 205);
    EXPECT_NEAR(adjusted_criterion(p), 2.0, 1e-12);
}

TEST(Sizes, PresetBlockArithmetic) {
    struct Row {
        const char* name;
        int b, n1, n2, blocks, channels;
    };
    for (const Row& r : {Row{"tiny", 1, 8, 6, 15, 192}, Row{"small", 1, 11, 10, 22, 192},
                         Row{"normal", 2, 10, 7, 26, 224}, Row{"large", 2, 13, 11, 37, 224}}) {
        const auto s = alphavile_size(r.name);
        EXPECT_EQ(s.stage2_blocks, r.b);
        EXPECT_EQ(s.stage1_mcb, r.n1);
        EXPECT_EQ(s.stage2_mcb, r.n2);
        EXPECT_EQ(s.total_blocks, r.blocks);
        EXPECT_EQ(s.total_blocks, s.stage1_mcb + s.stage2_blocks * (s.stage2_mcb + 1));
        EXPECT_EQ(s.base_channels, r.channels);
        EXPECT_EQ(s.base_channels % 32, 0);
    }
    EXPECT_THROW(alphavile_size("huge"), std::invalid_argument);
}

TEST(Sizes, ValidationRejectsBadSpecs) {
    EXPECT_THROW(NetworkSpec::make("x", 1, 8, 6, 200), std::invalid_argument);
    NetworkSpec s = alphavile_size("tiny");
    s.total_blocks = 14;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sizes, JsonKeys) {
    const auto j = to_json(alphavile_size("tiny"));
    EXPECT_EQ(j["B"], 1);
    EXPECT_EQ(j["N1"], 8);
    EXPECT_EQ(j["N2"], 6);
    EXPECT_EQ(j["blocks"], 15);
    EXPECT_EQ(j["channels"], 192);
}
