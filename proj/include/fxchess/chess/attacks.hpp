#pragma once

#include <array>

#include "fxchess/chess/types.hpp"

namespace fxchess::attacks {

namespace detail {

constexpr Bitboard step_set(int sq, std::initializer_list<std::pair<int, int>> deltas) {
    Bitboard b = 0;
    const int f = sq & 7, r = sq >> 3;
    for (auto [df, dr] : deltas) {
        const int nf = f + df, nr = r + dr;
        if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8) b |= Bitboard{1} << (nr * 8 + nf);
    }
    return b;
}

constexpr auto make_knight() {
    std::array<Bitboard, 64> t{};
    for (int s = 0; s < 64; ++s)
        t[s] = step_set(s, {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}});
    return t;
}

constexpr auto make_king() {
    std::array<Bitboard, 64> t{};
    for (int s = 0; s < 64; ++s)
        t[s] = step_set(s, {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}});
    return t;
}

constexpr auto make_pawn() {
    std::array<std::array<Bitboard, 64>, 2> t{};
    for (int s = 0; s < 64; ++s) {
        t[0][s] = step_set(s, {{-1, 1}, {1, 1}});
        t[1][s] = step_set(s, {{-1, -1}, {1, -1}});
    }
    return t;
}

// Direction order: N, E, NE, NW (increasing index), S, W, SW, SE (decreasing index).
constexpr std::array<std::pair<int, int>, 8> kDirs = {
    {{0, 1}, {1, 0}, {1, 1}, {-1, 1}, {0, -1}, {-1, 0}, {-1, -1}, {1, -1}}};

constexpr auto make_rays() {
    std::array<std::array<Bitboard, 64>, 8> t{};
    for (int d = 0; d < 8; ++d) {
        for (int s = 0; s < 64; ++s) {
            Bitboard b = 0;
            int f = (s & 7) + kDirs[d].first, r = (s >> 3) + kDirs[d].second;
            while (f >= 0 && f < 8 && r >= 0 && r < 8) {
                b |= Bitboard{1} << (r * 8 + f);
                f += kDirs[d].first;
                r += kDirs[d].second;
            }
            t[d][s] = b;
        }
    }
    return t;
}

inline constexpr auto kKnight = make_knight();
inline constexpr auto kKing = make_king();
inline constexpr auto kPawn = make_pawn();
inline constexpr auto kRays = make_rays();

inline Bitboard ray_attacks(int dir, int sq, Bitboard occ) {
    const Bitboard ray = kRays[dir][sq];
    const Bitboard blockers = ray & occ;
    if (!blockers) return ray;
    const int first = dir < 4 ? lsb(blockers) : msb(blockers);
    return ray ^ kRays[dir][first];
}

}  // namespace detail

inline Bitboard knight(Square s) { return detail::kKnight[s.index()]; }
inline Bitboard king(Square s) { return detail::kKing[s.index()]; }
/// Squares a pawn of `c` standing on `s` attacks.
inline Bitboard pawn(Color c, Square s) { return detail::kPawn[index_of(c)][s.index()]; }

inline Bitboard rook(Square s, Bitboard occ) {
    const int i = s.index();
    return detail::ray_attacks(0, i, occ) | detail::ray_attacks(1, i, occ) |
           detail::ray_attacks(4, i, occ) | detail::ray_attacks(5, i, occ);
}

inline Bitboard bishop(Square s, Bitboard occ) {
    const int i = s.index();
    return detail::ray_attacks(2, i, occ) | detail::ray_attacks(3, i, occ) |
           detail::ray_attacks(6, i, occ) | detail::ray_attacks(7, i, occ);
}

inline Bitboard queen(Square s, Bitboard occ) { return rook(s, occ) | bishop(s, occ); }

}  // namespace fxchess::attacks
