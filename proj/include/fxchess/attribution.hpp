#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fxchess/inference.hpp"
#include "fxchess/planes.hpp"

namespace fxchess {

enum class AttributionTarget { value, win, draw, loss, ply };

inline AttributionTarget parse_attribution_target(std::string_view s) {
    if (s == "v" || s == "value") return AttributionTarget::value;
    if (s == "w" || s == "win") return AttributionTarget::win;
    if (s == "d" || s == "draw") return AttributionTarget::draw;
    if (s == "l" || s == "loss") return AttributionTarget::loss;
    if (s == "ply" || s == "plies") return AttributionTarget::ply;
    throw std::invalid_argument("unknown attribution target '" + std::string(s) + "' (expected v, w, d, l, ply)");
}

inline std::string_view to_string(AttributionTarget t) {
    switch (t) {
    case AttributionTarget::value: return "v";
    case AttributionTarget::win: return "w";
    case AttributionTarget::draw: return "d";
    case AttributionTarget::loss: return "l";
    case AttributionTarget::ply: return "ply";
    }
    return "?";
}

enum class BaselineKind { zeros, dataset_mean, custom };

inline std::string_view to_string(BaselineKind k) {
    switch (k) {
    case BaselineKind::zeros: return "zeros";
    case BaselineKind::dataset_mean: return "mean";
    case BaselineKind::custom: return "custom";
    }
    return "?";
}

inline double select_target(const WdlpOutput& out, AttributionTarget t) {
    switch (t) {
    case AttributionTarget::value: return out.win - out.loss;
    case AttributionTarget::win: return out.win;
    case AttributionTarget::draw: return out.draw;
    case AttributionTarget::loss: return out.loss;
    case AttributionTarget::ply: return out.plies_left;
    }
    return 0.0;
}

/// Scalar network output F(x) for the chosen target.
inline double target_output(const Network& net, std::span<const double> x, AttributionTarget t) {
    return select_target(forward_value(net, x), t);
}

namespace detail {

/// Splits F into an affine first map and a cheap tail so that a single-cell perturbation
/// only costs one column update of the first map.
class FirstLayerSplit {
public:
    FirstLayerSplit(const Network& net, AttributionTarget target) : net_(net), target_(target) {
        if (net.layers.empty()) {
            stacked_ = DenseLayer::zeros(net.input_dim(), 4);
            std::copy(net.wdl_head.w.begin(), net.wdl_head.w.end(), stacked_.w.begin());
            std::copy(net.ply_head.w.begin(), net.ply_head.w.end(), stacked_.w.begin() + 3 * stacked_.in);
            stacked_.b = {net.wdl_head.b[0], net.wdl_head.b[1], net.wdl_head.b[2], net.ply_head.b[0]};
            first_ = &stacked_;
        } else {
            first_ = &net.layers[0];
        }
    }

    FirstLayerSplit(const FirstLayerSplit&) = delete;
    FirstLayerSplit& operator=(const FirstLayerSplit&) = delete;

    const DenseLayer& first() const { return *first_; }

    double tail(std::vector<double> z) const {
        if (net_.layers.empty()) {
            const auto p = softmax3({z[0], z[1], z[2]});
            return select_target({p[0], p[1], p[2], std::max(0.0, z[3])}, target_);
        }
        first_->activate(z);
        for (std::size_t i = 1; i < net_.layers.size(); ++i) z = net_.layers[i].apply(z);
        return select_target(value_heads(net_, z), target_);
    }

private:
    const Network& net_;
    AttributionTarget target_;
    DenseLayer stacked_;
    const DenseLayer* first_ = nullptr;
};

inline std::vector<double> fd_gradient(const FirstLayerSplit& split, std::span<const double> x, double eps,
                                       std::span<const char> active) {
    const DenseLayer& first = split.first();
    const auto z0 = first.pre_activation(x);
    std::vector<double> grad(x.size(), 0.0);
    std::vector<double> z(z0.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        for (int r = 0; r < first.out; ++r) z[r] = z0[r] + eps * first.weight(r, static_cast<int>(i));
        const double up = split.tail(z);
        for (int r = 0; r < first.out; ++r) z[r] = z0[r] - eps * first.weight(r, static_cast<int>(i));
        const double down = split.tail(z);
        grad[i] = (up - down) / (2.0 * eps);
    }
    return grad;
}

}  // namespace detail

inline constexpr double kDefaultGradientEps = 1e-3;
inline constexpr int kDefaultIgSteps = 64;

/// Central-difference gradient of the target output, one entry per input cell.
inline std::vector<double> finite_diff_gradient(const Network& net, const PlaneStack& stack,
                                                AttributionTarget target = AttributionTarget::value,
                                                double eps = kDefaultGradientEps) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
    if (static_cast<int>(stack.size()) != net.input_dim()) throw std::invalid_argument("plane stack does not match network input");
    const detail::FirstLayerSplit split(net, target);
    return detail::fd_gradient(split, stack.data, eps, {});
}

struct AttributionMap {
    InputVersion version = InputVersion::v2;
    int channels = 0;
    /// channels x 64, same layout as PlaneStack::data.
    std::vector<double> attributions;
    std::vector<double> channel_means;
    BaselineKind baseline_kind = BaselineKind::custom;
    int steps = 0;
    AttributionTarget target = AttributionTarget::value;

    double total() const {
        double s = 0.0;
        for (double a : attributions) s += a;
        return s;
    }
};

inline void compute_channel_means(AttributionMap& m) {
    m.channel_means.assign(m.channels, 0.0);
    for (int c = 0; c < m.channels; ++c) {
        double s = 0.0;
        for (int sq = 0; sq < 64; ++sq) s += m.attributions[static_cast<std::size_t>(c) * 64 + sq];
        m.channel_means[c] = s / 64.0;
    }
}

/// Right-endpoint Riemann approximation of Integrated Gradients along the straight path baseline -> input.
inline AttributionMap integrated_gradients(const Network& net, const PlaneStack& stack, const PlaneStack& baseline,
                                           int steps = kDefaultIgSteps,
                                           AttributionTarget target = AttributionTarget::value,
                                           BaselineKind kind = BaselineKind::custom,
                                           double eps = kDefaultGradientEps) {
    if (!stack.same_shape(baseline) || stack.size() != baseline.size())
        throw std::invalid_argument("input and baseline plane stacks differ in shape");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (static_cast<int>(stack.size()) != net.input_dim()) throw std::invalid_argument("plane stack does not match network input");

    const std::size_t n = stack.size();
    std::vector<char> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = stack.data[i] != baseline.data[i];

    const detail::FirstLayerSplit split(net, target);
    std::vector<double> grad_sum(n, 0.0), point(n);
    for (int k = 1; k <= steps; ++k) {
        const double alpha = static_cast<double>(k) / steps;
        for (std::size_t i = 0; i < n; ++i) point[i] = baseline.data[i] + alpha * (stack.data[i] - baseline.data[i]);
        const auto g = detail::fd_gradient(split, point, eps, active);
        for (std::size_t i = 0; i < n; ++i) grad_sum[i] += g[i];
    }

    AttributionMap m;
    m.version = stack.version;
    m.channels = stack.channels;
    m.baseline_kind = kind;
    m.steps = steps;
    m.target = target;
    m.attributions.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (active[i]) m.attributions[i] = (stack.data[i] - baseline.data[i]) * grad_sum[i] / steps;
    compute_channel_means(m);
    return m;
}

/// |sum attr - (F(x) - F(baseline))|
inline double completeness_residual(const Network& net, const PlaneStack& stack, const PlaneStack& baseline,
                                    const AttributionMap& attr) {
    const double delta = target_output(net, stack.data, attr.target) - target_output(net, baseline.data, attr.target);
    return std::abs(attr.total() - delta);
}

inline PlaneStack zeros_baseline(InputVersion version) { return PlaneStack::zeros(version); }

inline PlaneStack mean_baseline(std::span<const Position> positions, InputVersion version) {
    if (positions.empty()) throw std::invalid_argument("mean baseline needs at least one position");
    PlaneStack mean = PlaneStack::zeros(version);
    for (const auto& p : positions) {
        const auto s = encode(p, version);
        for (std::size_t i = 0; i < s.size(); ++i) mean.data[i] += s.data[i];
    }
    for (double& v : mean.data) v /= static_cast<double>(positions.size());
    return mean;
}

struct ChannelAttribution {
    int index = 0;
    std::string name;
    double mean = 0.0;
};

inline std::vector<ChannelAttribution> channel_report(const AttributionMap& attr,
                                                      std::span<const ChannelDescriptor> layout) {
    if (static_cast<int>(layout.size()) != attr.channels || static_cast<int>(attr.channel_means.size()) != attr.channels)
        throw std::invalid_argument("layout has " + std::to_string(layout.size()) + " channels, attribution has " +
                                    std::to_string(attr.channels));
    std::vector<ChannelAttribution> rows;
    rows.reserve(layout.size());
    for (const auto& d : layout) rows.push_back({d.index, d.name, attr.channel_means[d.index]});
    return rows;
}

inline std::string format_report(std::span<const ChannelAttribution> rows) {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    std::string out;
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%3d  ", r.index);
        out += buf;
        out += r.name;
        out.append(width - r.name.size() + 2, ' ');
        std::snprintf(buf, sizeof buf, "%+.6e\n", r.mean);
        out += buf;
    }
    return out;
}

inline nlohmann::json report_to_json(const AttributionMap& attr, std::span<const ChannelAttribution> rows) {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& r : rows) channels.push_back({{"index", r.index}, {"name", r.name}, {"mean_attribution", r.mean}});
    return {{"version", std::string(to_string(attr.version))},
            {"target", std::string(to_string(attr.target))},
            {"baseline", std::string(to_string(attr.baseline_kind))},
            {"steps", attr.steps},
            {"total_attribution", attr.total()},
            {"channels", std::move(channels)}};
}

}  // namespace fxchess
