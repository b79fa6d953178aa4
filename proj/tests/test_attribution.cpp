#include <gtest/gtest.h>

#include <cmath>

#include "fxchess/attribution.hpp"
#include "test_support.hpp"

using namespace fxchess;

namespace {

/// Net whose ply output is a plain affine map of the input: one identity layer feeding a
/// single-unit ply head with a large bias so max(0, .) never clips.
Network linear_ply_net(std::uint64_t seed, bool with_layer) {
    Network net = random_network(seed, "linear");
    if (with_layer) {
        DenseLayer id = DenseLayer::zeros(net.input_dim(), net.input_dim(), Activation::identity);
        for (int i = 0; i < id.in; ++i) id.weight(i, i) = 1.0;
        net.layers.push_back(std::move(id));
    }
    net.ply_head.b[0] = 10.0;
    return net;
}

/// Hand-derived chain rule for one relu hidden layer and the v = W - L target.
std::vector<double> analytic_value_gradient(const Network& net, const std::vector<double>& x) {
    const auto& l0 = net.layers.at(0);
    const auto a = l0.pre_activation(x);
    std::vector<double> h(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) h[j] = std::max(0.0, a[j]);
    const auto z = net.wdl_head.pre_activation(h);
    const auto p = softmax3({z[0], z[1], z[2]});
    double dz[3];
    for (int k = 0; k < 3; ++k) dz[k] = p[k] * (((k == 0) - (k == 2)) - (p[0] - p[2]));
    std::vector<double> dh(h.size(), 0.0);
    for (std::size_t j = 0; j < h.size(); ++j)
        for (int k = 0; k < 3; ++k) dh[j] += dz[k] * net.wdl_head.weight(k, static_cast<int>(j));
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (a[j] <= 0) continue;
        for (std::size_t i = 0; i < x.size(); ++i) g[i] += dh[j] * l0.weight(static_cast<int>(j), static_cast<int>(i));
    }
    return g;
}

std::vector<Position> fixture_positions() {
    std::vector<Position> out{Position::startpos()};
    const auto lines = fxtest::data_lines("opposite_bishops.fen");
    for (int i = 0; i < 4; ++i) out.push_back(parse_fen(lines[i]));
    return out;
}

}  // namespace

TEST(Gradient, LinearNetGradientIsWeightVector) {
    for (bool layer : {false, true}) {
        const Network net = linear_ply_net(3, layer);
        const auto s = encode(parse_fen("8/3k4/8/2pK4/8/4b1p1/8/5B2 w - - 0 56"), InputVersion::v2);
        const auto g = finite_diff_gradient(net, s, AttributionTarget::ply);
        ASSERT_EQ(g.size(), s.size());
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], net.ply_head.w[i], 1e-9);
    }
}

TEST(Gradient, ConstantNetHasZeroGradient) {
    Network net = random_network(1);
    for (auto& w : net.layers[0].w) w = 0;
    const auto g = finite_diff_gradient(net, encode(Position::startpos(), InputVersion::v2));
    for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(Gradient, MatchesAnalyticChainRule) {
    for (std::uint64_t seed : {2u, 5u, 8u}) {
        const Network net = random_network(seed, "tiny");
        for (const auto& p : fxtest::random_ongoing_positions(3, seed)) {
            const auto s = encode(p, InputVersion::v2);
            const auto fd = finite_diff_gradient(net, s);
            const auto an = analytic_value_gradient(net, s.data);
            for (std::size_t i = 0; i < fd.size(); ++i) EXPECT_NEAR(fd[i], an[i], 1e-5) << "cell " << i;
        }
    }
}

TEST(Gradient, RejectsBadArguments) {
    const Network net = random_network(1);
    const auto s = encode(Position::startpos(), InputVersion::v2);
    EXPECT_THROW(finite_diff_gradient(net, s, AttributionTarget::value, 0.0), std::invalid_argument);
    EXPECT_THROW(finite_diff_gradient(net, encode(Position::startpos(), InputVersion::v1)), std::invalid_argument);
}

TEST(IntegratedGradients, BaselineEqualToInputGivesZero) {
    const Network net = random_network(4);
    const auto s = encode(Position::startpos(), InputVersion::v2);
    const auto a = integrated_gradients(net, s, s, 8);
    for (double x : a.attributions) EXPECT_EQ(x, 0.0);
}

TEST(IntegratedGradients, ExactOnLinearFunctions) {
    for (bool layer : {false, true}) {
        const Network net = linear_ply_net(6, layer);
        const auto s = encode(parse_fen("5k2/8/8/7p/1b1p4/8/B7/5K2 b - - 0 56"), InputVersion::v2);
        const auto base = mean_baseline(std::vector<Position>{Position::startpos()}, InputVersion::v2);
        for (int steps : {1, 3, 16}) {
            const auto a = integrated_gradients(net, s, base, steps, AttributionTarget::ply);
            for (std::size_t i = 0; i < s.size(); ++i)
                EXPECT_NEAR(a.attributions[i], net.ply_head.w[i] * (s.data[i] - base.data[i]), 1e-9);
        }
    }
}

TEST(IntegratedGradients, CompletenessTightensWithSteps) {
    const auto positions = fixture_positions();
    const auto mean = mean_baseline(fxtest::random_positions(64, 1), InputVersion::v2);
    const auto zeros = zeros_baseline(InputVersion::v2);
    double worst64 = 0, worst1024 = 0;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const Network net = random_network(seed);
        for (const auto& p : positions) {
            const auto s = encode(p, InputVersion::v2);
            for (const auto* base : {&zeros, &mean}) {
                const double delta = target_output(net, s.data, AttributionTarget::value) -
                                     target_output(net, base->data, AttributionTarget::value);
                const double bound = 1e-2 * std::abs(delta) + 1e-4;
                const double r1024 = completeness_residual(net, s, *base, integrated_gradients(net, s, *base, 1024));
                EXPECT_LE(r1024, bound) << emit_fen(p);
                worst1024 = std::max(worst1024, r1024 / bound);
                worst64 = std::max(worst64,
                                   completeness_residual(net, s, *base, integrated_gradients(net, s, *base, 64)) / bound);
            }
        }
    }
    EXPECT_LT(worst1024, worst64);
}

TEST(IntegratedGradients, SensitivityNull) {
    const Network net = random_network(7);
    const auto s = encode(Position::startpos(), InputVersion::v2);
    const auto z = zeros_baseline(InputVersion::v2);
    const auto a = integrated_gradients(net, s, z, 16);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.data[i] == 0.0) {
            EXPECT_EQ(a.attributions[i], 0.0);
        }
    }
}

TEST(IntegratedGradients, ScalingTheHeadScalesAttributions) {
    Network net = random_network(8);
    net.ply_head.b[0] = 50.0;  // keeps the ply output away from the clamp
    const auto s = encode(parse_fen("8/2k1b3/2P5/3KP2B/8/8/8/8 w - - 0 56"), InputVersion::v2);
    const auto z = zeros_baseline(InputVersion::v2);
    const auto a = integrated_gradients(net, s, z, 32, AttributionTarget::ply);
    Network scaled = net;
    for (double& w : scaled.ply_head.w) w *= 3.0;
    for (double& b : scaled.ply_head.b) b *= 3.0;
    const auto b = integrated_gradients(scaled, s, z, 32, AttributionTarget::ply);
    EXPECT_NEAR(b.total(), 3.0 * a.total(), 1e-6 * std::max(1.0, std::abs(a.total())));
}

TEST(IntegratedGradients, DoublingStepsDoesNotBlowUpResidual) {
    const Network net = random_network(2);
    const auto s = encode(parse_fen("8/3k4/8/2pK4/8/4b1p1/8/5B2 w - - 0 56"), InputVersion::v2);
    const auto z = zeros_baseline(InputVersion::v2);
    double previous = -1;
    for (int steps : {8, 16, 32, 64}) {
        const double r = completeness_residual(net, s, z, integrated_gradients(net, s, z, steps));
        if (previous >= 0) {
            EXPECT_LE(r, 2.0 * previous + 1e-12) << steps;
        }
        previous = r;
    }
}

TEST(IntegratedGradients, ShapeAndStepErrors) {
    const Network net = random_network(1);
    const auto s = encode(Position::startpos(), InputVersion::v2);
    EXPECT_THROW(integrated_gradients(net, s, zeros_baseline(InputVersion::v1)), std::invalid_argument);
    EXPECT_THROW(integrated_gradients(net, s, s, 0), std::invalid_argument);
}

TEST(Baselines, MeanOfOneAndOfMirroredPair) {
    const Position p = parse_fen("5k2/8/8/7p/1b1p4/8/B7/5K2 b - - 0 56");
    const std::vector<Position> one{p};
    EXPECT_EQ(mean_baseline(one, InputVersion::v2), encode(p, InputVersion::v2));
    const std::vector<Position> pair{p, mirror(p)};
    EXPECT_EQ(mean_baseline(pair, InputVersion::v2), encode(p, InputVersion::v2));
    EXPECT_THROW(mean_baseline(std::vector<Position>{}, InputVersion::v2), std::invalid_argument);
}

TEST(Report, RowsFollowLayout) {
    AttributionMap m;
    m.channels = 52;
    m.attributions.assign(52 * 64, 0.0);
    compute_channel_means(m);
    const auto layout = plane_layout(InputVersion::v2);
    auto rows = channel_report(m, layout);
    ASSERT_EQ(rows.size(), 52u);
    for (const auto& r : rows) EXPECT_EQ(r.mean, 0.0);
    for (int i = 0; i < 64; ++i) m.attributions[i] = 1.0;
    compute_channel_means(m);
    rows = channel_report(m, layout);
    EXPECT_EQ(rows[0].name, "P1 PAWN");
    EXPECT_DOUBLE_EQ(rows[0].mean, 1.0);
    EXPECT_THROW(channel_report(m, plane_layout(InputVersion::v1)), std::invalid_argument);
}

TEST(Report, OppositeBishopFixtureWithSeededNet) {
    const Network net = random_network(12);
    const auto s = encode(parse_fen("8/3k4/8/2pK4/8/4b1p1/8/5B2 w - - 0 56"), InputVersion::v2);
    const auto a = integrated_gradients(net, s, zeros_baseline(InputVersion::v2), 16, AttributionTarget::value,
                                        BaselineKind::zeros);
    const auto layout = plane_layout(InputVersion::v2);
    const auto rows = channel_report(a, layout);
    EXPECT_EQ(rows.size(), 52u);
    const auto j = report_to_json(a, rows);
    EXPECT_EQ(j["channels"].size(), 52u);
    EXPECT_EQ(j["baseline"], "zeros");
    EXPECT_NE(format_report(rows).find("Opposite color bishops"), std::string::npos);
    bool negative = false;
    for (const auto& r : rows) negative |= r.mean < 0;
    EXPECT_TRUE(negative) << "signed means are kept";
}

TEST(Targets, Parsing) {
    EXPECT_EQ(parse_attribution_target("v"), AttributionTarget::value);
    EXPECT_EQ(parse_attribution_target("ply"), AttributionTarget::ply);
    EXPECT_THROW(parse_attribution_target("q"), std::invalid_argument);
}
