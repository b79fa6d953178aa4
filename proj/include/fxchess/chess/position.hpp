#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fxchess/chess/attacks.hpp"
#include "fxchess/chess/types.hpp"

namespace fxchess {

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

/// Raised by parse_fen; `field()` names the FEN field that failed.
class FenError : public std::runtime_error {
public:
    FenError(std::string field, const std::string& detail)
        : std::runtime_error("FEN parse error in field '" + field + "': " + detail),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class IllegalMoveError : public std::invalid_argument {
public:
    IllegalMoveError(std::string move_text, const std::string& fen)
        : std::invalid_argument("illegal move '" + move_text + "' in position " + fen),
          move_(std::move(move_text)) {}
    const std::string& move() const { return move_; }

private:
    std::string move_;
};

enum class GameStatus {
    ongoing,
    checkmate,
    stalemate,
    draw_fifty_move,
    draw_threefold,
    draw_insufficient_material,
};

inline std::string_view to_string(GameStatus s) {
    switch (s) {
    case GameStatus::ongoing: return "ongoing";
    case GameStatus::checkmate: return "checkmate";
    case GameStatus::stalemate: return "stalemate";
    case GameStatus::draw_fifty_move: return "draw_fifty_move";
    case GameStatus::draw_threefold: return "draw_threefold";
    case GameStatus::draw_insufficient_material: return "draw_insufficient_material";
    }
    return "unknown";
}

inline bool is_draw(GameStatus s) {
    return s != GameStatus::ongoing && s != GameStatus::checkmate;
}

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct ZobristTables {
    std::array<std::array<std::array<std::uint64_t, 64>, 6>, 2> piece{};
    std::array<std::uint64_t, 4> castling{};
    std::array<std::uint64_t, 8> ep_file{};
    std::uint64_t black_to_move = 0;
};

constexpr ZobristTables make_zobrist() {
    ZobristTables z{};
    std::uint64_t state = 0x5EED'F00D'C0FF'EE00ULL;
    for (auto& side : z.piece)
        for (auto& type : side)
            for (auto& v : type) v = splitmix64(state);
    for (auto& v : z.castling) v = splitmix64(state);
    for (auto& v : z.ep_file) v = splitmix64(state);
    z.black_to_move = splitmix64(state);
    return z;
}

inline constexpr ZobristTables kZobrist = make_zobrist();

struct HistoryNode {
    std::uint64_t key;
    std::shared_ptr<const HistoryNode> prev;
};

}  // namespace detail

class Position;
Position parse_fen(std::string_view text);
Position apply_move_unchecked(const Position& pos, const Move& mv);
Position mirror(const Position& pos);

/// Full game state. Immutable once built; new states come from apply_move.
class Position {
public:
    static Position startpos() { return parse_fen(kStartFen); }

    Bitboard pieces(Color c, PieceType t) const { return pieces_[index_of(c)][index_of(t)]; }
    Bitboard occupancy(Color c) const { return occ_[index_of(c)]; }
    Bitboard occupancy() const { return occ_[0] | occ_[1]; }

    std::optional<std::pair<Color, PieceType>> piece_at(Square s) const {
        for (int c = 0; c < 2; ++c) {
            if (!(occ_[c] & s.bit())) continue;
            for (int t = 0; t < 6; ++t)
                if (pieces_[c][t] & s.bit())
                    return std::pair{static_cast<Color>(c), static_cast<PieceType>(t)};
        }
        return std::nullopt;
    }

    Square king_square(Color c) const { return Square::from_index(lsb(pieces(c, PieceType::king))); }

    Color side_to_move() const { return side_; }

    /// Castling right for `c`; `king_side` false means queen side.
    bool can_castle(Color c, bool king_side) const { return castling_[index_of(c) * 2 + (king_side ? 0 : 1)]; }

    /// FEN en-passant field: set after every double pawn push.
    std::optional<Square> en_passant_square() const { return ep_; }

    int halfmove_clock() const { return halfmove_; }
    int fullmove_number() const { return fullmove_; }

    /// Times this exact position occurred earlier in the recorded game.
    int repetition_count() const { return repetitions_; }

    /// Up to eight most recent moves, newest first.
    std::span<const Move> move_trail() const { return {trail_.data(), trail_len_}; }

    /// Repetition identity: placement, side to move, castling rights, en-passant availability.
    std::uint64_t key() const { return key_; }

    int material_count(Color c, PieceType t) const { return popcount(pieces(c, t)); }

private:
    friend Position parse_fen(std::string_view text);
    friend Position apply_move_unchecked(const Position& pos, const Move& mv);
    friend Position mirror(const Position& pos);

    Position() = default;

    void put(Color c, PieceType t, Square s) {
        pieces_[index_of(c)][index_of(t)] |= s.bit();
        occ_[index_of(c)] |= s.bit();
    }
    void remove(Color c, PieceType t, Square s) {
        pieces_[index_of(c)][index_of(t)] &= ~s.bit();
        occ_[index_of(c)] &= ~s.bit();
    }

    std::uint64_t compute_key() const;

    std::array<std::array<Bitboard, 6>, 2> pieces_{};
    std::array<Bitboard, 2> occ_{};
    Color side_ = Color::white;
    std::array<bool, 4> castling_{};
    std::optional<Square> ep_;
    int halfmove_ = 0;
    int fullmove_ = 1;
    int repetitions_ = 0;
    std::array<Move, 8> trail_{};
    std::size_t trail_len_ = 0;
    std::uint64_t key_ = 0;
    std::shared_ptr<const detail::HistoryNode> history_;
};

// ---------------------------------------------------------------------------
// Attack queries

inline Bitboard attackers_to(const std::array<std::array<Bitboard, 6>, 2>& pcs, Bitboard occ, Square s,
                             Color by) {
    const int b = index_of(by);
    const Bitboard diag = pcs[b][index_of(PieceType::bishop)] | pcs[b][index_of(PieceType::queen)];
    const Bitboard orth = pcs[b][index_of(PieceType::rook)] | pcs[b][index_of(PieceType::queen)];
    return (attacks::pawn(~by, s) & pcs[b][index_of(PieceType::pawn)]) |
           (attacks::knight(s) & pcs[b][index_of(PieceType::knight)]) |
           (attacks::king(s) & pcs[b][index_of(PieceType::king)]) | (attacks::bishop(s, occ) & diag) |
           (attacks::rook(s, occ) & orth);
}

inline Bitboard attackers_to(const Position& pos, Square s, Color by) {
    std::array<std::array<Bitboard, 6>, 2> pcs{};
    for (int c = 0; c < 2; ++c)
        for (int t = 0; t < 6; ++t) pcs[c][t] = pos.pieces(static_cast<Color>(c), static_cast<PieceType>(t));
    return attackers_to(pcs, pos.occupancy(), s, by);
}

/// Opposing pieces giving check to the side to move.
inline Bitboard checkers(const Position& pos) {
    return attackers_to(pos, pos.king_square(pos.side_to_move()), ~pos.side_to_move());
}

inline bool in_check(const Position& pos) { return checkers(pos) != 0; }

// ---------------------------------------------------------------------------
// Move generation

namespace detail {

using PieceBoards = std::array<std::array<Bitboard, 6>, 2>;

inline PieceBoards boards_of(const Position& pos) {
    PieceBoards pcs{};
    for (int c = 0; c < 2; ++c)
        for (int t = 0; t < 6; ++t) pcs[c][t] = pos.pieces(static_cast<Color>(c), static_cast<PieceType>(t));
    return pcs;
}

inline int type_at(const PieceBoards& pcs, int color, Square s) {
    for (int t = 0; t < 6; ++t)
        if (pcs[color][t] & s.bit()) return t;
    return -1;
}

/// True when making `mv` (non-castling) leaves the mover's king unattacked.
inline bool king_safe_after(const Position& pos, PieceBoards pcs, const Move& mv) {
    const int us = index_of(pos.side_to_move());
    const int them = 1 - us;
    const int moving = type_at(pcs, us, mv.from);
    pcs[us][moving] &= ~mv.from.bit();
    pcs[us][moving] |= mv.to.bit();
    if (mv.is_en_passant) {
        const Square victim(mv.to.file(), mv.from.rank());
        pcs[them][index_of(PieceType::pawn)] &= ~victim.bit();
    } else {
        for (auto& b : pcs[them]) b &= ~mv.to.bit();
    }
    Bitboard occ = 0;
    for (int c = 0; c < 2; ++c)
        for (int t = 0; t < 6; ++t) occ |= pcs[c][t];
    const Square king = Square::from_index(lsb(pcs[us][index_of(PieceType::king)]));
    return attackers_to(pcs, occ, king, static_cast<Color>(them)) == 0;
}

inline void push_pawn_move(std::vector<Move>& out, Square from, Square to, bool promote, bool ep = false) {
    if (promote) {
        for (Promotion p : {Promotion::knight, Promotion::bishop, Promotion::rook, Promotion::queen})
            out.push_back(Move{from, to, p, false, false});
    } else {
        out.push_back(Move{from, to, Promotion::none, false, ep});
    }
}

inline void generate_pseudo(const Position& pos, std::vector<Move>& out) {
    const Color us = pos.side_to_move();
    const Color them = ~us;
    const Bitboard own = pos.occupancy(us);
    const Bitboard enemy = pos.occupancy(them);
    const Bitboard occ = own | enemy;
    const int forward = us == Color::white ? 1 : -1;
    const int start_rank = us == Color::white ? 1 : 6;
    const int last_rank = us == Color::white ? 7 : 0;

    for (Bitboard b = pos.pieces(us, PieceType::pawn); b; b &= b - 1) {
        const Square from = Square::from_index(lsb(b));
        const int r1 = from.rank() + forward;
        const Square one(from.file(), r1);
        if (!(occ & one.bit())) {
            push_pawn_move(out, from, one, r1 == last_rank);
            if (from.rank() == start_rank) {
                const Square two(from.file(), r1 + forward);
                if (!(occ & two.bit())) push_pawn_move(out, from, two, false);
            }
        }
        const Bitboard hits = attacks::pawn(us, from);
        for (Bitboard c = hits & enemy; c; c &= c - 1) {
            const Square to = Square::from_index(lsb(c));
            push_pawn_move(out, from, to, to.rank() == last_rank);
        }
        if (const auto ep = pos.en_passant_square(); ep && (hits & ep->bit()))
            push_pawn_move(out, from, *ep, false, true);
    }

    auto emit = [&](PieceType t, auto&& targets_of) {
        for (Bitboard b = pos.pieces(us, t); b; b &= b - 1) {
            const Square from = Square::from_index(lsb(b));
            for (Bitboard m = targets_of(from) & ~own; m; m &= m - 1)
                out.push_back(Move{from, Square::from_index(lsb(m))});
        }
    };
    emit(PieceType::knight, [](Square s) { return attacks::knight(s); });
    emit(PieceType::bishop, [occ](Square s) { return attacks::bishop(s, occ); });
    emit(PieceType::rook, [occ](Square s) { return attacks::rook(s, occ); });
    emit(PieceType::queen, [occ](Square s) { return attacks::queen(s, occ); });
    emit(PieceType::king, [](Square s) { return attacks::king(s); });
}

inline void generate_castling(const Position& pos, std::vector<Move>& out) {
    const Color us = pos.side_to_move();
    const int rank = us == Color::white ? 0 : 7;
    const Square king(4, rank);
    if (!(pos.pieces(us, PieceType::king) & king.bit())) return;
    const Bitboard occ = pos.occupancy();
    if (attackers_to(pos, king, ~us)) return;
    if (pos.can_castle(us, true)) {
        const Square f(5, rank), g(6, rank);
        if (!(occ & (f.bit() | g.bit())) && !attackers_to(pos, f, ~us) && !attackers_to(pos, g, ~us))
            out.push_back(Move{king, g, Promotion::none, true, false});
    }
    if (pos.can_castle(us, false)) {
        const Square d(3, rank), c(2, rank), b(1, rank);
        if (!(occ & (d.bit() | c.bit() | b.bit())) && !attackers_to(pos, d, ~us) && !attackers_to(pos, c, ~us))
            out.push_back(Move{king, c, Promotion::none, true, false});
    }
}

}  // namespace detail

/// All legal moves in canonical order (from-index, to-index, promotion code).
inline std::vector<Move> legal_moves(const Position& pos) {
    std::vector<Move> pseudo;
    pseudo.reserve(64);
    detail::generate_pseudo(pos, pseudo);
    const auto boards = detail::boards_of(pos);
    std::vector<Move> legal;
    legal.reserve(pseudo.size() + 2);
    for (const Move& m : pseudo)
        if (detail::king_safe_after(pos, boards, m)) legal.push_back(m);
    detail::generate_castling(pos, legal);
    std::sort(legal.begin(), legal.end(), canonical_less);
    return legal;
}

/// True when the side to move has a legal en-passant capture.
inline bool en_passant_capturable(const Position& pos) {
    const auto ep = pos.en_passant_square();
    if (!ep) return false;
    const Color us = pos.side_to_move();
    const auto boards = detail::boards_of(pos);
    for (Bitboard b = attacks::pawn(~us, *ep) & pos.pieces(us, PieceType::pawn); b; b &= b - 1) {
        const Move m{Square::from_index(lsb(b)), *ep, Promotion::none, false, true};
        if (detail::king_safe_after(pos, boards, m)) return true;
    }
    return false;
}

inline std::uint64_t Position::compute_key() const {
    const auto& z = detail::kZobrist;
    std::uint64_t k = 0;
    for (int c = 0; c < 2; ++c)
        for (int t = 0; t < 6; ++t)
            for (Bitboard b = pieces_[c][t]; b; b &= b - 1) k ^= z.piece[c][t][lsb(b)];
    for (int i = 0; i < 4; ++i)
        if (castling_[i]) k ^= z.castling[i];
    if (side_ == Color::black) k ^= z.black_to_move;
    if (ep_ && en_passant_capturable(*this)) k ^= z.ep_file[ep_->file()];
    return k;
}

// ---------------------------------------------------------------------------
// FEN

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

inline int parse_clock(std::string_view s, const char* field, int min_value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw FenError(field, "not an integer: '" + std::string(s) + "'");
    if (v < min_value || v > 100000) throw FenError(field, "out of range: " + std::to_string(v));
    return v;
}

constexpr std::string_view kPieceChars = "pnbrqk";

}  // namespace detail

/// Parses 4 to 6 FEN fields; missing clocks default to 0 and 1.
inline Position parse_fen(std::string_view text) {
    const auto fields = detail::split_ws(text);
    if (fields.empty()) throw FenError("placement", "empty FEN");
    if (fields.size() > 6) throw FenError("field count", "expected 4 to 6 fields, got " + std::to_string(fields.size()));

    Position pos;
    {
        int rank = 7, file = 0;
        for (char ch : fields[0]) {
            if (ch == '/') {
                if (file != 8) throw FenError("placement", "rank " + std::to_string(rank + 1) + " does not have 8 files");
                if (--rank < 0) throw FenError("placement", "too many ranks");
                file = 0;
            } else if (ch >= '1' && ch <= '8') {
                file += ch - '0';
                if (file > 8) throw FenError("placement", "rank " + std::to_string(rank + 1) + " overflows");
            } else {
                const auto idx = detail::kPieceChars.find(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
                if (idx == std::string_view::npos) throw FenError("placement", std::string("unknown piece '") + ch + "'");
                if (file > 7) throw FenError("placement", "rank " + std::to_string(rank + 1) + " overflows");
                const Color c = std::isupper(static_cast<unsigned char>(ch)) ? Color::white : Color::black;
                pos.put(c, static_cast<PieceType>(idx), Square(file, rank));
                ++file;
            }
        }
        if (rank != 0 || file != 8) throw FenError("placement", "expected 8 ranks of 8 files");
        for (Color c : {Color::white, Color::black}) {
            const int kings = pos.material_count(c, PieceType::king);
            if (kings == 0) throw FenError("placement", "missing kings");
            if (kings > 1) throw FenError("placement", "more than one king per side");
        }
        constexpr Bitboard back_ranks = 0xFF000000000000FFULL;
        if ((pos.pieces(Color::white, PieceType::pawn) | pos.pieces(Color::black, PieceType::pawn)) & back_ranks)
            throw FenError("placement", "pawn on first or last rank");
    }

    if (fields.size() < 2) throw FenError("side to move", "missing field");
    if (fields[1] == "w") pos.side_ = Color::white;
    else if (fields[1] == "b") pos.side_ = Color::black;
    else throw FenError("side to move", "expected 'w' or 'b', got '" + std::string(fields[1]) + "'");

    if (fields.size() < 3) throw FenError("castling", "missing field");
    if (fields[2] != "-") {
        constexpr std::string_view flags = "KQkq";
        for (char ch : fields[2]) {
            const auto i = flags.find(ch);
            if (i == std::string_view::npos || pos.castling_[i]) throw FenError("castling", "bad flag '" + std::string(1, ch) + "'");
            pos.castling_[i] = true;
        }
        for (int i = 0; i < 4; ++i) {
            if (!pos.castling_[i]) continue;
            const Color c = i < 2 ? Color::white : Color::black;
            const int rank = c == Color::white ? 0 : 7;
            const Square rook(i % 2 == 0 ? 7 : 0, rank);
            if (!(pos.pieces(c, PieceType::king) & Square(4, rank).bit()) || !(pos.pieces(c, PieceType::rook) & rook.bit()))
                throw FenError("castling", std::string("right '") + flags[i] + "' without king and rook on their home squares");
        }
    }

    if (fields.size() < 4) throw FenError("en passant", "missing field");
    if (fields[3] != "-") {
        const auto sq = Square::parse(fields[3]);
        if (!sq) throw FenError("en passant", "bad square '" + std::string(fields[3]) + "'");
        const int expected_rank = pos.side_ == Color::white ? 5 : 2;
        if (sq->rank() != expected_rank) throw FenError("en passant", "square must be on rank " + std::to_string(expected_rank + 1));
        const Color pusher = ~pos.side_;
        const Square pawn(sq->file(), pusher == Color::white ? 3 : 4);
        if (!(pos.pieces(pusher, PieceType::pawn) & pawn.bit()) || (pos.occupancy() & sq->bit()))
            throw FenError("en passant", "no double-pushed pawn behind " + sq->name());
        pos.ep_ = *sq;
    }

    if (fields.size() >= 5) pos.halfmove_ = detail::parse_clock(fields[4], "halfmove clock", 0);
    if (fields.size() >= 6) pos.fullmove_ = detail::parse_clock(fields[5], "fullmove number", 1);

    if (attackers_to(pos, pos.king_square(~pos.side_), pos.side_))
        throw FenError("side to move", "the side not to move is in check");

    pos.key_ = pos.compute_key();
    return pos;
}

inline std::string emit_fen(const Position& pos) {
    constexpr std::string_view upper = "PNBRQK", lower = "pnbrqk";
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            const auto p = pos.piece_at(Square(file, rank));
            if (!p) {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty), empty = 0;
            out += (p->first == Color::white ? upper : lower)[index_of(p->second)];
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (rank) out += '/';
    }
    out += pos.side_to_move() == Color::white ? " w " : " b ";
    std::string castle;
    if (pos.can_castle(Color::white, true)) castle += 'K';
    if (pos.can_castle(Color::white, false)) castle += 'Q';
    if (pos.can_castle(Color::black, true)) castle += 'k';
    if (pos.can_castle(Color::black, false)) castle += 'q';
    out += castle.empty() ? "-" : castle;
    out += ' ';
    out += pos.en_passant_square() ? pos.en_passant_square()->name() : "-";
    out += ' ' + std::to_string(pos.halfmove_clock()) + ' ' + std::to_string(pos.fullmove_number());
    return out;
}

// ---------------------------------------------------------------------------
// Making moves

/// Applies a move already known to be legal.
inline Position apply_move_unchecked(const Position& pos, const Move& mv) {
    Position next = pos;
    const Color us = pos.side_;
    const Color them = ~us;
    const auto moving_pair = pos.piece_at(mv.from);
    const PieceType moving = moving_pair->second;

    bool capture = false;
    if (mv.is_en_passant) {
        next.remove(them, PieceType::pawn, Square(mv.to.file(), mv.from.rank()));
        capture = true;
    } else if (const auto victim = pos.piece_at(mv.to); victim) {
        next.remove(them, victim->second, mv.to);
        capture = true;
    }

    next.remove(us, moving, mv.from);
    next.put(us, mv.promotion == Promotion::none ? moving : piece_of(mv.promotion), mv.to);

    if (mv.is_castle) {
        const int rank = mv.from.rank();
        const bool king_side = mv.to.file() == 6;
        next.remove(us, PieceType::rook, Square(king_side ? 7 : 0, rank));
        next.put(us, PieceType::rook, Square(king_side ? 5 : 3, rank));
    }

    next.ep_.reset();
    if (moving == PieceType::pawn && std::abs(mv.to.rank() - mv.from.rank()) == 2)
        next.ep_ = Square(mv.from.file(), (mv.from.rank() + mv.to.rank()) / 2);

    auto drop_rights_at = [&next](Square s) {
        if (s == Square(4, 0)) next.castling_[0] = next.castling_[1] = false;
        if (s == Square(4, 7)) next.castling_[2] = next.castling_[3] = false;
        if (s == Square(7, 0)) next.castling_[0] = false;
        if (s == Square(0, 0)) next.castling_[1] = false;
        if (s == Square(7, 7)) next.castling_[2] = false;
        if (s == Square(0, 7)) next.castling_[3] = false;
    };
    drop_rights_at(mv.from);
    drop_rights_at(mv.to);

    next.halfmove_ = (moving == PieceType::pawn || capture) ? 0 : pos.halfmove_ + 1;
    if (us == Color::black) ++next.fullmove_;
    next.side_ = them;

    for (std::size_t i = std::min<std::size_t>(pos.trail_len_, 7); i > 0; --i) next.trail_[i] = pos.trail_[i - 1];
    next.trail_[0] = mv;
    next.trail_len_ = std::min<std::size_t>(pos.trail_len_ + 1, 8);

    next.history_ = std::make_shared<const detail::HistoryNode>(detail::HistoryNode{pos.key_, pos.history_});
    next.key_ = next.compute_key();

    // Positions before the last irreversible move cannot recur.
    int reps = 0;
    int window = next.halfmove_;
    for (const detail::HistoryNode* h = next.history_.get(); h && window > 0; h = h->prev.get(), --window)
        if (h->key == next.key_) ++reps;
    next.repetitions_ = reps;
    return next;
}

/// Applies `mv` after checking it against the legal move list.
inline Position apply_move(const Position& pos, const Move& mv) {
    for (const Move& m : legal_moves(pos))
        if (m.same_squares(mv)) return apply_move_unchecked(pos, m);
    throw IllegalMoveError(mv.uci(), emit_fen(pos));
}

/// Resolves long algebraic text ("e2e4", "a7a8q") against the legal moves.
inline Move parse_uci_move(const Position& pos, std::string_view text) {
    const auto legal = legal_moves(pos);
    for (const Move& m : legal)
        if (m.uci() == text) return m;
    throw IllegalMoveError(std::string(text), emit_fen(pos));
}

// ---------------------------------------------------------------------------
// Termination

inline bool insufficient_material(const Position& pos) {
    for (Color c : {Color::white, Color::black})
        if (pos.pieces(c, PieceType::pawn) | pos.pieces(c, PieceType::rook) | pos.pieces(c, PieceType::queen))
            return false;
    const Bitboard knights = pos.pieces(Color::white, PieceType::knight) | pos.pieces(Color::black, PieceType::knight);
    const Bitboard bishops = pos.pieces(Color::white, PieceType::bishop) | pos.pieces(Color::black, PieceType::bishop);
    if (popcount(knights | bishops) <= 1) return true;
    constexpr Bitboard light = 0x55AA55AA55AA55AAULL;
    return knights == 0 && ((bishops & light) == 0 || (bishops & ~light) == 0);
}

inline GameStatus game_status(const Position& pos, std::span<const Move> legal) {
    if (legal.empty()) return in_check(pos) ? GameStatus::checkmate : GameStatus::stalemate;
    if (insufficient_material(pos)) return GameStatus::draw_insufficient_material;
    if (pos.halfmove_clock() >= 100) return GameStatus::draw_fifty_move;
    if (pos.repetition_count() >= 2) return GameStatus::draw_threefold;
    return GameStatus::ongoing;
}

inline GameStatus game_status(const Position& pos) {
    const auto legal = legal_moves(pos);
    return game_status(pos, legal);
}

// ---------------------------------------------------------------------------
// Utilities

inline Move mirror(const Move& m) {
    return Move{m.from.flipped(), m.to.flipped(), m.promotion, m.is_castle, m.is_en_passant};
}

/// Color-mirrored twin: board flipped vertically, colors and castling rights swapped,
/// side to move flipped. Clocks, repetition count and move trail carry over; the
/// earlier-position history does not.
inline Position mirror(const Position& pos) {
    Position m;
    for (int c = 0; c < 2; ++c) {
        for (int t = 0; t < 6; ++t) m.pieces_[1 - c][t] = flip_ranks(pos.pieces_[c][t]);
        m.occ_[1 - c] = flip_ranks(pos.occ_[c]);
    }
    m.side_ = ~pos.side_;
    m.castling_ = {pos.castling_[2], pos.castling_[3], pos.castling_[0], pos.castling_[1]};
    if (pos.ep_) m.ep_ = pos.ep_->flipped();
    m.halfmove_ = pos.halfmove_;
    m.fullmove_ = pos.fullmove_;
    m.repetitions_ = pos.repetitions_;
    m.trail_len_ = pos.trail_len_;
    for (std::size_t i = 0; i < pos.trail_len_; ++i) m.trail_[i] = mirror(pos.trail_[i]);
    m.key_ = m.compute_key();
    return m;
}

/// Standard algebraic notation, including check and mate suffixes.
inline std::string to_san(const Position& pos, const Move& mv) {
    std::string san;
    if (mv.is_castle) {
        san = mv.to.file() == 6 ? "O-O" : "O-O-O";
    } else {
        const PieceType moving = pos.piece_at(mv.from)->second;
        const bool capture = mv.is_en_passant || (pos.occupancy(~pos.side_to_move()) & mv.to.bit());
        if (moving == PieceType::pawn) {
            if (capture) san += static_cast<char>('a' + mv.from.file());
        } else {
            san += "PNBRQK"[index_of(moving)];
            bool clash = false, same_file = false, same_rank = false;
            for (const Move& o : legal_moves(pos)) {
                if (o.to != mv.to || o.from == mv.from || pos.piece_at(o.from)->second != moving) continue;
                clash = true;
                same_file |= o.from.file() == mv.from.file();
                same_rank |= o.from.rank() == mv.from.rank();
            }
            if (clash) {
                if (!same_file) san += static_cast<char>('a' + mv.from.file());
                else if (!same_rank) san += static_cast<char>('1' + mv.from.rank());
                else san += mv.from.name();
            }
        }
        if (capture) san += 'x';
        san += mv.to.name();
        if (mv.promotion != Promotion::none) {
            san += '=';
            san += " NBRQ"[static_cast<int>(mv.promotion)];
        }
    }
    const Position next = apply_move_unchecked(pos, mv);
    if (in_check(next)) san += legal_moves(next).empty() ? '#' : '+';
    return san;
}

inline std::uint64_t perft(const Position& pos, int depth) {
    if (depth <= 0) return 1;
    const auto moves = legal_moves(pos);
    if (depth == 1) return moves.size();
    std::uint64_t nodes = 0;
    for (const Move& m : moves) nodes += perft(apply_move_unchecked(pos, m), depth - 1);
    return nodes;
}

}  // namespace fxchess
