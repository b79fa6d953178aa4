#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fxchess/chess/types.hpp"

namespace fxchess {

/// Win/draw/loss probabilities from the mover's perspective plus predicted plies to game end.
struct WdlpOutput {
    double win = 0.0;
    double draw = 1.0;
    double loss = 0.0;
    double plies_left = 0.0;

    std::array<double, 3> wdl() const { return {win, draw, loss}; }
};

enum class GameResult { white_win, draw, black_win };

struct TrainingTarget {
    std::array<double, 3> wdl_target{0.0, 1.0, 0.0};
    std::vector<double> policy_target;
    double plies_target = 0.0;
    double outcome_scalar = 0.0;
};

/// Loss weights. alpha weighs the value (or WDL) term, beta the plies term, c the L2 term.
struct LossWeights {
    double alpha = 0.01;
    double beta = 0.0;
    double c = 0.0;
    double policy_weight = 1.0;

    /// Classical value/policy loss: value factor 0.01, unweighted policy term.
    static constexpr LossWeights classical() { return {0.01, 0.0, 0.0, 1.0}; }
    /// WDLP defaults: wdl 0.01, policy 0.988, plies 0.002.
    static constexpr LossWeights wdlp() { return {0.01, 0.002, 0.0, 0.988}; }

    void validate() const {
        if (alpha < 0 || beta < 0 || c < 0 || policy_weight < 0)
            throw std::invalid_argument("loss weights must be non-negative");
    }
};

inline constexpr double kSimplexTolerance = 1e-9;

inline void validate_distribution(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " has an entry outside [0, 1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
        throw std::invalid_argument(std::string(what) + " does not sum to 1 (sum = " + std::to_string(sum) + ")");
}

inline void validate(const WdlpOutput& out) {
    const auto t = out.wdl();
    validate_distribution(t, "WDL triple");
    if (!(out.plies_left >= 0.0)) throw std::invalid_argument("plies_left must be non-negative");
}

/// Scalar value v = W - L, in [-1, 1].
inline double value_from_wdl(const WdlpOutput& out) {
    validate_distribution(out.wdl(), "WDL triple");
    return out.win - out.loss;
}

namespace detail {

/// -weight * sum target_i log pred_i, skipping zero-target entries.
inline double cross_entropy(std::span<const double> target, std::span<const double> pred, const char* what) {
    if (target.size() != pred.size()) throw std::invalid_argument(std::string(what) + ": target and prediction sizes differ");
    double ce = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] == 0.0) continue;
        if (!(pred[i] > 0.0))
            throw std::domain_error(std::string(what) + ": predicted probability is zero at index " + std::to_string(i) +
                                    " where the target is positive (infinite loss)");
        ce -= target[i] * std::log(pred[i]);
    }
    return ce;
}

}  // namespace detail

/// alpha (z - v)^2 - w_pi * pi^T log p + c ||theta||^2
inline double classical_loss(const TrainingTarget& target, double v, std::span<const double> policy,
                             double theta_sq_norm, const LossWeights& w = LossWeights::classical()) {
    w.validate();
    if (std::abs(v) > 1.0) throw std::invalid_argument("value prediction outside [-1, 1]");
    validate_distribution(target.policy_target, "policy target");
    const double err = target.outcome_scalar - v;
    return w.alpha * err * err + w.policy_weight * detail::cross_entropy(target.policy_target, policy, "policy") +
           w.c * theta_sq_norm;
}

/// -alpha WDL_t^T log WDL_p - w_pi * pi^T log p + beta (ply_t - ply_p)^2 + c ||theta||^2
inline double wdlp_loss(const TrainingTarget& target, const WdlpOutput& pred, std::span<const double> policy,
                        double theta_sq_norm, const LossWeights& w = LossWeights::wdlp()) {
    w.validate();
    validate_distribution(target.wdl_target, "WDL target");
    validate_distribution(target.policy_target, "policy target");
    const auto p = pred.wdl();
    validate_distribution(p, "WDL prediction");
    const double ply_err = target.plies_target - pred.plies_left;
    return w.alpha * detail::cross_entropy(target.wdl_target, p, "WDL") +
           w.policy_weight * detail::cross_entropy(target.policy_target, policy, "policy") + w.beta * ply_err * ply_err +
           w.c * theta_sq_norm;
}

/// Closed-form partial derivatives of the classical loss.
struct ClassicalLossGradient {
    double d_value = 0.0;
    std::vector<double> d_policy;
    double d_theta_sq_norm = 0.0;
};

inline ClassicalLossGradient classical_loss_gradient(const TrainingTarget& target, double v,
                                                     std::span<const double> policy,
                                                     const LossWeights& w = LossWeights::classical()) {
    ClassicalLossGradient g;
    g.d_value = -2.0 * w.alpha * (target.outcome_scalar - v);
    g.d_policy.resize(policy.size(), 0.0);
    for (std::size_t i = 0; i < policy.size(); ++i)
        if (target.policy_target[i] != 0.0) g.d_policy[i] = -w.policy_weight * target.policy_target[i] / policy[i];
    g.d_theta_sq_norm = w.c;
    return g;
}

/// Closed-form partials of the WDLP loss, treating each WDL_p entry as a free variable.
struct WdlpLossGradient {
    std::array<double, 3> d_wdl{};
    std::vector<double> d_policy;
    double d_plies = 0.0;
    double d_theta_sq_norm = 0.0;
};

inline WdlpLossGradient wdlp_loss_gradient(const TrainingTarget& target, const WdlpOutput& pred,
                                           std::span<const double> policy, const LossWeights& w = LossWeights::wdlp()) {
    WdlpLossGradient g;
    const auto p = pred.wdl();
    for (int j = 0; j < 3; ++j)
        if (target.wdl_target[j] != 0.0) g.d_wdl[j] = -w.alpha * target.wdl_target[j] / p[j];
    g.d_policy.resize(policy.size(), 0.0);
    for (std::size_t i = 0; i < policy.size(); ++i)
        if (target.policy_target[i] != 0.0) g.d_policy[i] = -w.policy_weight * target.policy_target[i] / policy[i];
    g.d_plies = -2.0 * w.beta * (target.plies_target - pred.plies_left);
    g.d_theta_sq_norm = w.c;
    return g;
}

/// Training target from a finished game, seen from `side_to_move`.
inline TrainingTarget target_from_game(GameResult result, Color side_to_move, int plies_remaining,
                                       std::vector<double> policy_target = {}) {
    if (plies_remaining < 0) throw std::invalid_argument("plies_remaining must be >= 0");
    TrainingTarget t;
    t.policy_target = std::move(policy_target);
    t.plies_target = plies_remaining;
    if (result == GameResult::draw) {
        t.wdl_target = {0.0, 1.0, 0.0};
        t.outcome_scalar = 0.0;
        return t;
    }
    const bool mover_won = (result == GameResult::white_win) == (side_to_move == Color::white);
    t.wdl_target = mover_won ? std::array<double, 3>{1.0, 0.0, 0.0} : std::array<double, 3>{0.0, 0.0, 1.0};
    t.outcome_scalar = mover_won ? 1.0 : -1.0;
    return t;
}

}  // namespace fxchess
