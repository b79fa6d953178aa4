#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fxchess {

/// Compound-scaling factors: depth d = alpha^phi, width w = beta^phi, resolution r = gamma^phi.
/// The 8x8 board fixes gamma at 1.
struct ScalingParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double phi = 1.0;

    void validate() const {
        if (!(alpha >= 1.0)) throw std::invalid_argument("depth factor alpha must be >= 1");
        if (!(beta >= 1.0)) throw std::invalid_argument("width factor beta must be >= 1");
        if (gamma != 1.0) throw std::invalid_argument("resolution factor gamma is fixed at 1");
        if (!(phi >= 0.0)) throw std::invalid_argument("compound coefficient phi must be >= 0");
    }
};

struct ScaledDimensions {
    int depth = 0;
    int channels = 0;
};

inline constexpr int kBaseDepth = 10;
inline constexpr int kBaseChannels = 192;

inline ScaledDimensions scaled_dimensions(const ScalingParams& p, int base_depth = kBaseDepth,
                                          int base_channels = kBaseChannels) {
    p.validate();
    return {static_cast<int>(std::lround(base_depth * std::pow(p.alpha, p.phi))),
            static_cast<int>(std::lround(base_channels * std::pow(p.beta, p.phi)))};
}

/// Latency-adjusted constraint alpha * beta^1.6 ~= 2 (default validator).
inline double adjusted_criterion(const ScalingParams& p) { return p.alpha * std::pow(p.beta, 1.6); }

/// EfficientNet's constraint alpha * beta^2 * gamma^2 ~= 2.
inline double original_criterion(const ScalingParams& p) { return p.alpha * p.beta * p.beta * p.gamma * p.gamma; }

inline bool check_adjusted_criterion(const ScalingParams& p, double tolerance) {
    return std::abs(adjusted_criterion(p) - 2.0) <= tolerance;
}

inline bool check_original_criterion(const ScalingParams& p, double tolerance) {
    return std::abs(original_criterion(p) - 2.0) <= tolerance;
}

/// One row of a scaling grid search: factors plus the depth and channels the grid used.
struct ScalingRow {
    ScalingParams params;
    int depth;
    int channels;
};

/// Grid with beta = sqrt(2 / alpha), built for the original criterion.
inline std::vector<ScalingRow> scaling_grid_original() {
    auto row = [](double a, double ratio, int depth, int channels) {
        return ScalingRow{{a, std::sqrt(ratio), 1.0, 1.0}, depth, channels};
    };
    return {row(1.0, 2.0, 10, 272),        row(1.2, 5.0 / 3.0, 12, 248), row(1.4, 10.0 / 7.0, 14, 229),
            row(1.6, 5.0 / 4.0, 16, 215),  row(1.8, 10.0 / 9.0, 18, 202), row(2.0, 1.0, 20, 192)};
}

/// Grid with beta = (2 / alpha)^(5/8), built for the adjusted criterion.
inline std::vector<ScalingRow> scaling_grid_adjusted() {
    auto row = [](double a, double ratio, int depth, int channels) {
        return ScalingRow{{a, std::pow(ratio, 5.0 / 8.0), 1.0, 1.0}, depth, channels};
    };
    return {row(1.0, 2.0, 10, 296),        row(1.2, 5.0 / 3.0, 12, 264), row(1.4, 10.0 / 7.0, 14, 240),
            row(1.6, 5.0 / 4.0, 16, 221),  row(1.8, 10.0 / 9.0, 18, 205), row(2.0, 1.0, 20, 192)};
}

/// Block arithmetic of the hybrid network: N1 stage-1 mobile blocks, then B repetitions of
/// (N2 mobile blocks + one transformer block).
struct NetworkSpec {
    std::string name;
    int stage2_blocks = 0;
    int stage1_mcb = 0;
    int stage2_mcb = 0;
    int base_channels = 0;
    int total_blocks = 0;

    static NetworkSpec make(std::string name, int b, int n1, int n2, int channels) {
        NetworkSpec s{std::move(name), b, n1, n2, channels, n1 + b * (n2 + 1)};
        s.validate();
        return s;
    }

    int transformer_blocks() const { return stage2_blocks; }

    void validate() const {
        if (stage2_blocks < 0 || stage1_mcb < 0 || stage2_mcb < 0) throw std::invalid_argument("block counts must be >= 0");
        if (base_channels <= 0 || base_channels % 32 != 0)
            throw std::invalid_argument("base channels must be a positive multiple of 32");
        if (total_blocks != stage1_mcb + stage2_blocks * (stage2_mcb + 1))
            throw std::invalid_argument("total blocks must equal N1 + B * (N2 + 1)");
    }
};

inline NetworkSpec alphavile_size(std::string_view name) {
    if (name == "tiny") return NetworkSpec::make("tiny", 1, 8, 6, 192);
    if (name == "small") return NetworkSpec::make("small", 1, 11, 10, 192);
    if (name == "normal") return NetworkSpec::make("normal", 2, 10, 7, 224);
    if (name == "large") return NetworkSpec::make("large", 2, 13, 11, 224);
    throw std::invalid_argument("unknown network size '" + std::string(name) + "' (expected tiny, small, normal, large)");
}

inline nlohmann::json to_json(const NetworkSpec& s) {
    return {{"name", s.name},          {"B", s.stage2_blocks},  {"N1", s.stage1_mcb},
            {"N2", s.stage2_mcb},      {"blocks", s.total_blocks}, {"channels", s.base_channels},
            {"transformer_blocks", s.transformer_blocks()}};
}

}  // namespace fxchess
