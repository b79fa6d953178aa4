#pragma once

#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fxchess/chess/position.hpp"

namespace fxtest {

using namespace fxchess;

/// Positions reached by uniformly random legal play from the start position.
inline std::vector<Position> random_positions(std::size_t count, std::uint64_t seed, int max_plies = 80) {
    std::mt19937_64 rng(seed);
    std::vector<Position> out;
    while (out.size() < count) {
        Position pos = Position::startpos();
        const int plies = std::uniform_int_distribution<int>(0, max_plies)(rng);
        for (int i = 0; i < plies; ++i) {
            const auto legal = legal_moves(pos);
            if (game_status(pos, legal) != GameStatus::ongoing) break;
            pos = apply_move_unchecked(pos, legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)]);
        }
        out.push_back(pos);
    }
    return out;
}

/// Non-terminal subset of random_positions.
inline std::vector<Position> random_ongoing_positions(std::size_t count, std::uint64_t seed, int max_plies = 80) {
    std::vector<Position> out;
    std::uint64_t s = seed;
    while (out.size() < count) {
        for (auto& p : random_positions(count, s++, max_plies))
            if (out.size() < count && game_status(p) == GameStatus::ongoing) out.push_back(p);
    }
    return out;
}

/// Non-comment, non-empty lines of a data file.
inline std::vector<std::string> data_lines(const std::string& name) {
    std::ifstream in(std::string(FXCHESS_DATA_DIR) + "/" + name);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

}  // namespace fxtest
