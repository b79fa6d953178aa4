#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fxchess {

using Bitboard = std::uint64_t;

enum class Color : std::uint8_t { white = 0, black = 1 };

constexpr Color operator~(Color c) { return c == Color::white ? Color::black : Color::white; }
constexpr int index_of(Color c) { return static_cast<int>(c); }

// Order matches the encoder's piece-plane order.
enum class PieceType : std::uint8_t { pawn = 0, knight, bishop, rook, queen, king };

constexpr std::array<PieceType, 6> kPieceTypes = {PieceType::pawn, PieceType::knight,
                                                  PieceType::bishop, PieceType::rook,
                                                  PieceType::queen, PieceType::king};

constexpr int index_of(PieceType t) { return static_cast<int>(t); }

// Promotion codes double as the policy-index promotion digit.
enum class Promotion : std::uint8_t { none = 0, knight = 1, bishop = 2, rook = 3, queen = 4 };

constexpr PieceType piece_of(Promotion p) {
    switch (p) {
    case Promotion::knight: return PieceType::knight;
    case Promotion::bishop: return PieceType::bishop;
    case Promotion::rook: return PieceType::rook;
    default: return PieceType::queen;
    }
}

class Square {
public:
    constexpr Square() = default;
    constexpr Square(int file, int rank) : index_(static_cast<std::uint8_t>(rank * 8 + file)) {
        if (file < 0 || file > 7 || rank < 0 || rank > 7) throw std::out_of_range("square off board");
    }

    static constexpr Square from_index(int index) { return Square(index & 7, index >> 3); }

    /// Parses "e4"-style names; returns nullopt on anything else.
    static std::optional<Square> parse(std::string_view text) {
        if (text.size() != 2) return std::nullopt;
        const int f = text[0] - 'a';
        const int r = text[1] - '1';
        if (f < 0 || f > 7 || r < 0 || r > 7) return std::nullopt;
        return Square(f, r);
    }

    constexpr int index() const { return index_; }
    constexpr int file() const { return index_ & 7; }
    constexpr int rank() const { return index_ >> 3; }
    constexpr Bitboard bit() const { return Bitboard{1} << index_; }

    /// Rank-flipped twin (r -> 7 - r), files untouched.
    constexpr Square flipped() const { return Square(file(), 7 - rank()); }

    /// Light squares have odd file+rank (a1 is dark).
    constexpr bool is_light() const { return ((file() + rank()) & 1) != 0; }

    std::string name() const {
        return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
    }

    constexpr auto operator<=>(const Square&) const = default;

private:
    std::uint8_t index_ = 0;
};

struct Move {
    Square from;
    Square to;
    Promotion promotion = Promotion::none;
    bool is_castle = false;
    bool is_en_passant = false;

    /// Long algebraic text, e.g. "e2e4", "e7e8q", "e1g1".
    std::string uci() const {
        std::string s = from.name() + to.name();
        constexpr std::string_view promo = " nbrq";
        if (promotion != Promotion::none) s += promo[static_cast<int>(promotion)];
        return s;
    }

    /// Canonical order: from-index, then to-index, then promotion code.
    constexpr int order_key() const {
        return from.index() * 64 * 5 + to.index() * 5 + static_cast<int>(promotion);
    }

    constexpr bool same_squares(const Move& other) const {
        return from == other.from && to == other.to && promotion == other.promotion;
    }

    constexpr bool operator==(const Move&) const = default;
};

constexpr bool canonical_less(const Move& a, const Move& b) { return a.order_key() < b.order_key(); }

inline int popcount(Bitboard b) { return std::popcount(b); }
inline int lsb(Bitboard b) { return std::countr_zero(b); }
inline int msb(Bitboard b) { return 63 - std::countl_zero(b); }

/// Vertical flip of a whole bitboard (rank r -> 7 - r).
inline Bitboard flip_ranks(Bitboard b) { return __builtin_bswap64(b); }

}  // namespace fxchess
