#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fxchess/chess/position.hpp"
#include "fxchess/inference.hpp"

namespace fxchess {

/// Per-edge statistics. value_sum is from the perspective of the side moving at the parent.
struct EdgeStats {
    double prior = 0.0;
    int visits = 0;
    double value_sum = 0.0;

    double q() const { return visits == 0 ? 0.0 : value_sum / visits; }
};

inline constexpr double kDefaultCPuct = 2.5;

/// argmax of Q + c * P * sqrt(sum N) / (1 + N); first index wins ties.
inline std::size_t puct_select(std::span<const EdgeStats> edges, double c_puct) {
    if (edges.empty()) throw std::invalid_argument("puct_select on a node without edges");
    int total = 0;
    for (const auto& e : edges) total += e.visits;
    const double sqrt_total = std::sqrt(static_cast<double>(total));
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        const double score = e.q() + c_puct * e.prior * sqrt_total / (1.0 + e.visits);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

struct SearchResult {
    Move best_move;
    /// Mean backed-up value at the root for the side to move, root evaluation included.
    double root_value = 0.0;
    WdlpOutput root_wdl;
    /// Visited root moves in canonical order with their counts.
    std::vector<std::pair<Move, int>> visit_distribution;
    /// Mean value Q of each visited root move, aligned with visit_distribution.
    std::vector<double> root_q;
    int nodes_expanded = 0;
    int simulations = 0;
    bool stopped = false;
};

struct SearchOptions {
    int budget = 800;
    double c_puct = kDefaultCPuct;
    std::uint64_t seed = 0;
    /// Checked between simulations; the root expansion always runs.
    const std::atomic<bool>* stop = nullptr;
};

namespace detail {

struct SearchEdge {
    Move move;
    EdgeStats stats;
    double draw_sum = 0.0;
    int child = -1;
};

struct SearchNode {
    Position pos;
    std::vector<SearchEdge> edges;
    bool expanded = false;
    bool terminal = false;
    /// Exact value for the side to move at a terminal node and its draw probability.
    double terminal_value = 0.0;
    double terminal_draw = 0.0;
};

class SearchTree {
public:
    SearchTree(const Evaluator& eval, double c_puct) : eval_(eval), c_puct_(c_puct) {}

    /// Returns the root's own evaluation (value, draw).
    std::pair<double, double> init_root(const Position& pos) {
        nodes_.push_back(make_node(pos));
        if (nodes_[0].terminal)
            throw std::invalid_argument("search root is terminal (" + std::string(to_string(game_status(pos))) + ")");
        return expand(0);
    }

    /// One select-expand-evaluate-backup pass; returns (value, draw) seen from the root mover.
    std::pair<double, double> simulate() {
        path_.clear();
        int node = 0;
        std::pair<double, double> leaf;
        while (true) {
            auto& n = nodes_[node];
            if (n.terminal) {
                leaf = {n.terminal_value, n.terminal_draw};
                break;
            }
            if (!n.expanded) {
                leaf = expand(node);
                break;
            }
            stats_.clear();
            for (const auto& e : n.edges) stats_.push_back(e.stats);
            const std::size_t pick = puct_select(stats_, c_puct_);
            path_.emplace_back(node, pick);
            if (n.edges[pick].child < 0) {
                const Position child_pos = apply_move_unchecked(n.pos, n.edges[pick].move);
                nodes_.push_back(make_node(child_pos));
                nodes_[node].edges[pick].child = static_cast<int>(nodes_.size()) - 1;
            }
            node = nodes_[node].edges[pick].child;
        }
        double v = leaf.first;
        for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
            v = -v;
            auto& e = nodes_[it->first].edges[it->second];
            e.stats.visits += 1;
            e.stats.value_sum += v;
            e.draw_sum += leaf.second;
        }
        return {v, leaf.second};
    }

    const SearchNode& root() const { return nodes_[0]; }
    int evaluations() const { return evaluations_; }

private:
    SearchNode make_node(const Position& pos) {
        SearchNode n{pos, {}, false, false, 0.0, 0.0};
        legal_ = legal_moves(pos);
        const GameStatus status = game_status(pos, legal_);
        if (status != GameStatus::ongoing) {
            n.terminal = true;
            n.terminal_value = status == GameStatus::checkmate ? -1.0 : 0.0;
            n.terminal_draw = status == GameStatus::checkmate ? 0.0 : 1.0;
        } else {
            n.edges.reserve(legal_.size());
            for (const Move& m : legal_) n.edges.push_back({m, {}, 0.0, -1});
        }
        return n;
    }

    std::pair<double, double> expand(int index) {
        auto& n = nodes_[index];
        legal_.clear();
        for (const auto& e : n.edges) legal_.push_back(e.move);
        const EvalOutput out = eval_.evaluate(n.pos, legal_);
        ++evaluations_;
        if (out.policy.size() != n.edges.size()) throw std::logic_error("evaluator policy size does not match legal moves");
        for (std::size_t i = 0; i < n.edges.size(); ++i) n.edges[i].stats.prior = out.policy[i];
        n.expanded = true;
        return {std::clamp(out.value(), -1.0, 1.0), std::clamp(out.wdlp.draw, 0.0, 1.0)};
    }

    const Evaluator& eval_;
    double c_puct_;
    std::vector<SearchNode> nodes_;
    std::vector<std::pair<int, std::size_t>> path_;
    std::vector<EdgeStats> stats_;
    std::vector<Move> legal_;
    int evaluations_ = 0;
};

}  // namespace detail

/// Runs `budget` simulations; the first one expands the root.
inline SearchResult run_search(const Position& pos, const Evaluator& evaluator, const SearchOptions& opt) {
    if (opt.budget < 1) throw std::invalid_argument("search budget must be >= 1");
    detail::SearchTree tree(evaluator, opt.c_puct);
    auto [v, d] = tree.init_root(pos);
    double value_sum = v, draw_sum = d;
    int sims = 1;
    SearchResult result;
    while (sims < opt.budget) {
        if (opt.stop && opt.stop->load(std::memory_order_relaxed)) {
            result.stopped = true;
            break;
        }
        auto [sv, sd] = tree.simulate();
        value_sum += sv;
        draw_sum += sd;
        ++sims;
    }

    const auto& root = tree.root();
    int best_visits = -1;
    for (const auto& e : root.edges) {
        if (e.stats.visits > best_visits) {
            best_visits = e.stats.visits;
            result.best_move = e.move;
        }
        if (e.stats.visits > 0) {
            result.visit_distribution.emplace_back(e.move, e.stats.visits);
            result.root_q.push_back(e.stats.q());
        }
    }
    result.simulations = sims;
    result.nodes_expanded = tree.evaluations();
    result.root_value = std::clamp(value_sum / sims, -1.0, 1.0);
    const double draw = std::clamp(draw_sum / sims, 0.0, 1.0);
    const double win = std::clamp((1.0 + result.root_value - draw) / 2.0, 0.0, 1.0);
    result.root_wdl = {win, draw, std::max(0.0, 1.0 - win - draw), 0.0};
    return result;
}

inline SearchResult run_search(const Position& pos, const Evaluator& evaluator, int budget,
                               double c_puct = kDefaultCPuct, std::uint64_t seed = 0) {
    return run_search(pos, evaluator, SearchOptions{budget, c_puct, seed, nullptr});
}

/// Move probabilities proportional to N^(1/T), aligned with visit_distribution; T = 0 is one-hot at best_move.
inline std::vector<double> visit_policy(const SearchResult& result, double temperature) {
    if (temperature < 0) throw std::invalid_argument("temperature must be >= 0");
    const auto& dist = result.visit_distribution;
    std::vector<double> p(dist.size(), 0.0);
    if (dist.empty()) return p;
    if (temperature == 0.0) {
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (dist[i].first == result.best_move) p[i] = 1.0;
        return p;
    }
    int max_n = 0;
    for (const auto& [m, n] : dist) max_n = std::max(max_n, n);
    double s = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        p[i] = std::pow(static_cast<double>(dist[i].second) / max_n, 1.0 / temperature);
        s += p[i];
    }
    for (double& v : p) v /= s;
    return p;
}

}  // namespace fxchess
