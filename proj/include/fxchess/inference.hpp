#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fxchess/chess/position.hpp"
#include "fxchess/planes.hpp"
#include "fxchess/wdlp.hpp"

namespace fxchess {

// ---------------------------------------------------------------------------
// Policy indexing

inline constexpr int kPolicySize = 64 * 64 * 5;

inline constexpr int move_index(const Move& m) { return m.order_key(); }

/// Inverse of move_index; castle and en-passant flags are not recoverable and stay false.
inline Move move_from_index(int index) {
    if (index < 0 || index >= kPolicySize) throw std::out_of_range("move index outside [0, 20480)");
    return Move{Square::from_index(index / 320), Square::from_index((index / 5) % 64),
                static_cast<Promotion>(index % 5)};
}

// ---------------------------------------------------------------------------
// Evaluator output

struct EvalOutput {
    /// Probabilities aligned with the legal-move list passed to the evaluator.
    std::vector<double> policy;
    WdlpOutput wdlp;

    double value() const { return wdlp.win - wdlp.loss; }

    /// Scatter onto the full 20480-entry move space; illegal entries are 0.
    std::vector<double> to_dense(std::span<const Move> legal) const {
        if (legal.size() != policy.size()) throw std::invalid_argument("policy does not match the legal-move list");
        std::vector<double> dense(kPolicySize, 0.0);
        for (std::size_t i = 0; i < legal.size(); ++i) dense[move_index(legal[i])] = policy[i];
        return dense;
    }
};

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual EvalOutput evaluate(const Position& pos, std::span<const Move> legal) const = 0;
    virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Material oracle

inline constexpr std::array<int, 5> kPieceValues = {1, 3, 3, 5, 9};

/// Pawn-unit material balance for the side to move.
inline int material_balance(const Position& pos) {
    const Color us = pos.side_to_move();
    int m = 0;
    for (int t = 0; t < 5; ++t) {
        const auto type = static_cast<PieceType>(t);
        m += kPieceValues[t] * (pos.material_count(us, type) - pos.material_count(~us, type));
    }
    return m;
}

/// WDL triple with W - L = v and W + D + L = 1 by construction.
inline WdlpOutput wdl_from_value(double v, double plies) {
    return {(1 + v) * (1 + v) / 4, (1 - v * v) / 2, (1 - v) * (1 - v) / 4, plies};
}

inline bool is_mating_move(const Position& pos, const Move& m) {
    const Position next = apply_move_unchecked(pos, m);
    return in_check(next) && legal_moves(next).empty();
}

inline EvalOutput material_oracle(const Position& pos, std::span<const Move> legal) {
    if (legal.empty()) throw std::invalid_argument("material oracle needs at least one legal move");
    EvalOutput out;
    out.wdlp = wdl_from_value(std::tanh(material_balance(pos) / 10.0), 40.0);
    out.policy.assign(legal.size(), 0.0);
    std::size_t mates = 0;
    for (std::size_t i = 0; i < legal.size(); ++i)
        if (is_mating_move(pos, legal[i])) {
            out.policy[i] = 1.0;
            ++mates;
        }
    if (mates == 0) std::fill(out.policy.begin(), out.policy.end(), 1.0 / legal.size());
    else
        for (double& p : out.policy) p /= static_cast<double>(mates);
    return out;
}

class MaterialEvaluator final : public Evaluator {
public:
    EvalOutput evaluate(const Position& pos, std::span<const Move> legal) const override {
        return material_oracle(pos, legal);
    }
    std::string name() const override { return "material"; }
};

// ---------------------------------------------------------------------------
// Dense network

enum class Activation { identity, relu };

inline Activation parse_activation(std::string_view s) {
    if (s == "identity" || s == "linear") return Activation::identity;
    if (s == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

inline std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

struct DenseLayer {
    int in = 0;
    int out = 0;
    /// Row-major out x in.
    std::vector<double> w;
    std::vector<double> b;
    Activation act = Activation::identity;

    static DenseLayer zeros(int in, int out, Activation act = Activation::identity) {
        return {in, out, std::vector<double>(static_cast<std::size_t>(in) * out, 0.0),
                std::vector<double>(static_cast<std::size_t>(out), 0.0), act};
    }

    double& weight(int row, int col) { return w[static_cast<std::size_t>(row) * in + col]; }
    double weight(int row, int col) const { return w[static_cast<std::size_t>(row) * in + col]; }

    double row_dot(int row, std::span<const double> x) const {
        const double* r = w.data() + static_cast<std::size_t>(row) * in;
        double acc = b[row];
        for (int j = 0; j < in; ++j) acc += r[j] * x[j];
        return acc;
    }

    /// Affine map only, no activation.
    std::vector<double> pre_activation(std::span<const double> x) const {
        std::vector<double> z(out);
        for (int i = 0; i < out; ++i) z[i] = row_dot(i, x);
        return z;
    }

    void activate(std::vector<double>& z) const {
        if (act == Activation::relu)
            for (double& v : z) v = std::max(0.0, v);
    }

    std::vector<double> apply(std::span<const double> x) const {
        auto z = pre_activation(x);
        activate(z);
        return z;
    }
};

struct Network {
    InputVersion version = InputVersion::v2;
    std::vector<DenseLayer> layers;
    DenseLayer policy_head;
    DenseLayer wdl_head;
    DenseLayer ply_head;

    int input_dim() const { return channel_count(version) * 64; }
    int trunk_dim() const { return layers.empty() ? input_dim() : layers.back().out; }
};

class NetworkLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline DenseLayer parse_layer(const nlohmann::json& j, const std::string& where, bool act_required) {
    if (!j.is_object()) throw NetworkLoadError(where + ": expected an object");
    if (!j.contains("w") || !j.contains("b")) throw NetworkLoadError(where + ": missing 'w' or 'b'");
    const auto& w = j.at("w");
    const auto& b = j.at("b");
    if (!w.is_array() || w.empty() || !b.is_array()) throw NetworkLoadError(where + ": 'w' and 'b' must be non-empty arrays");
    DenseLayer layer;
    layer.out = static_cast<int>(w.size());
    if (!w[0].is_array() || w[0].empty()) throw NetworkLoadError(where + ": 'w' must be a matrix");
    layer.in = static_cast<int>(w[0].size());
    layer.w.reserve(static_cast<std::size_t>(layer.in) * layer.out);
    try {
        for (const auto& row : w) {
            if (!row.is_array() || static_cast<int>(row.size()) != layer.in)
                throw NetworkLoadError(where + ": ragged weight matrix");
            for (const auto& v : row) layer.w.push_back(v.get<double>());
        }
        if (static_cast<int>(b.size()) != layer.out)
            throw NetworkLoadError(where + ": bias length " + std::to_string(b.size()) + " does not match " +
                                   std::to_string(layer.out) + " output rows");
        for (const auto& v : b) layer.b.push_back(v.get<double>());
    } catch (const nlohmann::json::exception&) {
        throw NetworkLoadError(where + ": non-numeric weight");
    }
    if (j.contains("act")) {
        try {
            layer.act = parse_activation(j.at("act").get<std::string>());
        } catch (const std::exception& e) {
            throw NetworkLoadError(where + ": " + e.what());
        }
    } else if (act_required) {
        throw NetworkLoadError(where + ": missing 'act'");
    }
    return layer;
}

inline nlohmann::json layer_to_json(const DenseLayer& l) {
    nlohmann::json w = nlohmann::json::array();
    for (int i = 0; i < l.out; ++i)
        w.push_back(std::vector<double>(l.w.begin() + static_cast<std::ptrdiff_t>(i) * l.in,
                                        l.w.begin() + static_cast<std::ptrdiff_t>(i + 1) * l.in));
    return {{"w", std::move(w)}, {"b", l.b}, {"act", std::string(to_string(l.act))}};
}

}  // namespace detail

inline void validate(const Network& net) {
    int expected = net.input_dim();
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        if (net.layers[i].in != expected)
            throw NetworkLoadError("dimension mismatch at layer " + std::to_string(i) + ": expected input " +
                                   std::to_string(expected) + ", got " + std::to_string(net.layers[i].in));
        expected = net.layers[i].out;
    }
    auto check_head = [expected](const DenseLayer& h, const char* name, int out) {
        if (h.in != expected)
            throw NetworkLoadError(std::string("dimension mismatch at ") + name + ": expected input " +
                                   std::to_string(expected) + ", got " + std::to_string(h.in));
        if (h.out != out)
            throw NetworkLoadError(std::string(name) + " must have " + std::to_string(out) + " outputs, got " +
                                   std::to_string(h.out));
    };
    check_head(net.policy_head, "policy_head", kPolicySize);
    check_head(net.wdl_head, "wdl_head", 3);
    check_head(net.ply_head, "ply_head", 1);
}

inline Network parse_network(const nlohmann::json& j) {
    if (!j.is_object()) throw NetworkLoadError("weight file: expected a JSON object");
    Network net;
    try {
        net.version = parse_input_version(j.value("version", std::string("V2")));
    } catch (const std::exception& e) {
        throw NetworkLoadError(std::string("weight file: ") + e.what());
    }
    if (!j.contains("layers") || !j.at("layers").is_array()) throw NetworkLoadError("weight file: missing 'layers' array");
    const auto& layers = j.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i)
        net.layers.push_back(detail::parse_layer(layers[i], "layer " + std::to_string(i), true));
    for (const char* head : {"policy_head", "wdl_head", "ply_head"})
        if (!j.contains(head)) throw NetworkLoadError(std::string("weight file: missing '") + head + "'");
    net.policy_head = detail::parse_layer(j.at("policy_head"), "policy_head", false);
    net.wdl_head = detail::parse_layer(j.at("wdl_head"), "wdl_head", false);
    net.ply_head = detail::parse_layer(j.at("ply_head"), "ply_head", false);
    validate(net);
    return net;
}

inline Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkLoadError("cannot open weight file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw NetworkLoadError("malformed JSON in '" + path + "': " + e.what());
    }
    return parse_network(j);
}

inline nlohmann::json to_json(const Network& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers) layers.push_back(detail::layer_to_json(l));
    return {{"version", std::string(to_string(net.version))},
            {"layers", std::move(layers)},
            {"policy_head", detail::layer_to_json(net.policy_head)},
            {"wdl_head", detail::layer_to_json(net.wdl_head)},
            {"ply_head", detail::layer_to_json(net.ply_head)}};
}

/// Output of the trunk after every hidden layer.
inline std::vector<double> trunk_forward(const Network& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("input has " + std::to_string(x.size()) + " values, network expects " +
                                    std::to_string(net.input_dim()));
    std::vector<double> h(x.begin(), x.end());
    for (const auto& layer : net.layers) h = layer.apply(h);
    return h;
}

inline std::array<double, 3> softmax3(std::array<double, 3> z) {
    const double m = std::max({z[0], z[1], z[2]});
    double s = 0.0;
    for (double& v : z) s += (v = std::exp(v - m));
    for (double& v : z) v /= s;
    return z;
}

/// WDL and plies from a trunk output.
inline WdlpOutput value_heads(const Network& net, std::span<const double> h) {
    const auto p = softmax3({net.wdl_head.row_dot(0, h), net.wdl_head.row_dot(1, h), net.wdl_head.row_dot(2, h)});
    return {p[0], p[1], p[2], std::max(0.0, net.ply_head.row_dot(0, h))};
}

inline WdlpOutput forward_value(const Network& net, std::span<const double> x) {
    return value_heads(net, trunk_forward(net, x));
}

inline EvalOutput forward(const Network& net, const PlaneStack& stack, std::span<const Move> legal) {
    if (stack.version != net.version || static_cast<int>(stack.size()) != net.input_dim())
        throw std::invalid_argument("plane stack does not match the network input (" +
                                    std::string(to_string(net.version)) + ")");
    if (legal.empty()) throw std::invalid_argument("forward needs at least one legal move");
    const auto h = trunk_forward(net, stack.data);
    EvalOutput out;
    out.wdlp = value_heads(net, h);
    out.policy.resize(legal.size());
    double m = -INFINITY;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        out.policy[i] = net.policy_head.row_dot(move_index(legal[i]), h);
        m = std::max(m, out.policy[i]);
    }
    double s = 0.0;
    for (double& v : out.policy) s += (v = std::exp(v - m));
    for (double& v : out.policy) v /= s;
    return out;
}

class NetworkEvaluator final : public Evaluator {
public:
    explicit NetworkEvaluator(std::shared_ptr<const Network> net, std::string label = "network")
        : net_(std::move(net)), label_(std::move(label)) {}

    EvalOutput evaluate(const Position& pos, std::span<const Move> legal) const override {
        return forward(*net_, encode(pos, net_->version), legal);
    }
    std::string name() const override { return label_; }
    const Network& network() const { return *net_; }

private:
    std::shared_ptr<const Network> net_;
    std::string label_;
};

// ---------------------------------------------------------------------------
// Random networks for tests and demos

/// Hidden widths for a named random-network preset.
inline std::vector<int> random_net_hidden(std::string_view preset) {
    if (preset == "tiny") return {16};
    if (preset == "small") return {32, 16};
    if (preset == "linear") return {};
    throw std::invalid_argument("unknown random network preset '" + std::string(preset) +
                                "' (expected tiny, small, linear)");
}

inline Network random_network(std::uint64_t seed, std::string_view preset = "tiny",
                              InputVersion version = InputVersion::v2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto make = [&](int in, int out, Activation act) {
        DenseLayer l = DenseLayer::zeros(in, out, act);
        const double scale = std::sqrt(3.0 / in);
        for (double& v : l.w) v = u(rng) * scale;
        for (double& v : l.b) v = 0.1 * u(rng);
        return l;
    };
    Network net;
    net.version = version;
    int width = net.input_dim();
    for (int h : random_net_hidden(preset)) {
        net.layers.push_back(make(width, h, Activation::relu));
        width = h;
    }
    net.policy_head = make(width, kPolicySize, Activation::identity);
    net.wdl_head = make(width, 3, Activation::identity);
    net.ply_head = make(width, 1, Activation::identity);
    net.ply_head.b[0] += 40.0;
    return net;
}

}  // namespace fxchess
