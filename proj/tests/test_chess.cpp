#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fxchess/chess/position.hpp"
#include "test_support.hpp"

using namespace fxchess;

namespace {

struct PerftCase {
    const char* fen;
    int depth;
    std::uint64_t nodes;
};

// Published reference counts (chessprogramming wiki perft suite).
const PerftCase kPerft[] = {
    {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", 1, 20},
    {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", 2, 400},
    {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", 3, 8902},
    {"rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", 4, 197281},
    {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", 1, 48},
    {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", 2, 2039},
    {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", 3, 97862},
    {"8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", 4, 43238},
    {"8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", 5, 674624},
    {"r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", 3, 9467},
    {"r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1", 4, 422333},
    {"rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", 3, 62379},
    {"r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10", 3, 89890},
};

}  // namespace

class PerftTest : public ::testing::TestWithParam<PerftCase> {};

TEST_P(PerftTest, MatchesReferenceCount) {
    const auto& c = GetParam();
    EXPECT_EQ(perft(parse_fen(c.fen), c.depth), c.nodes) << c.fen;
}

INSTANTIATE_TEST_SUITE_P(Reference, PerftTest, ::testing::ValuesIn(kPerft));

TEST(Fen, StartposRoundTrip) {
    EXPECT_EQ(emit_fen(Position::startpos()), std::string(kStartFen));
}

TEST(Fen, RoundTripOnRandomPositions) {
    for (const auto& p : fxtest::random_positions(300, 11)) {
        const std::string fen = emit_fen(p);
        const Position q = parse_fen(fen);
        EXPECT_EQ(emit_fen(q), fen);
        for (Color c : {Color::white, Color::black})
            for (PieceType t : kPieceTypes) EXPECT_EQ(p.pieces(c, t), q.pieces(c, t));
    }
}

TEST(Fen, FourFieldFormDefaultsClocks) {
    const Position p = parse_fen("8/8/8/8/8/8/8/K6k w - -");
    EXPECT_EQ(p.halfmove_clock(), 0);
    EXPECT_EQ(p.fullmove_number(), 1);
}

TEST(Fen, ErrorsNameTheField) {
    auto field_of = [](const char* fen) {
        try {
            (void)parse_fen(fen);
        } catch (const FenError& e) {
            return e.field();
        }
        return std::string("none");
    };
    EXPECT_EQ(field_of("bad"), "placement");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6k x - - 0 1"), "side to move");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6k w Z - 0 1"), "castling");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6k w - e9 0 1"), "en passant");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6k w - - x 1"), "halfmove clock");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6k w - - 0 0"), "fullmove number");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K6X w - - 0 1"), "placement");
    EXPECT_EQ(field_of("8/8/8/8/8/8/8/K7 w - - 0 1"), "placement");
    EXPECT_EQ(field_of("8/8/8/8/8/8/9/K6k w - - 0 1"), "placement");
    EXPECT_EQ(field_of("P7/8/8/8/8/8/8/K6k w - - 0 1"), "placement");
}

TEST(Fen, RejectsInconsistentState) {
    // Castling right without the rook on its corner.
    EXPECT_THROW(parse_fen("4k3/8/8/8/8/8/8/4K3 w K - 0 1"), FenError);
    // En-passant square without a pushed pawn.
    EXPECT_THROW(parse_fen("4k3/8/8/8/8/8/8/4K3 w - e6 0 1"), FenError);
}

TEST(Fen, OpponentInCheckIsRejected) {
    EXPECT_NO_THROW(parse_fen("4k3/8/8/8/8/8/8/4R1K1 b - - 0 1"));
    EXPECT_THROW(parse_fen("4k3/8/8/8/8/8/8/4R1K1 w - - 0 1"), FenError);
}

TEST(Moves, StartposHasTwentyCanonicalMoves) {
    const auto moves = legal_moves(Position::startpos());
    ASSERT_EQ(moves.size(), 20u);
    EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end(), canonical_less));
}

TEST(Moves, ParseUciAndIllegalMove) {
    const Position p = Position::startpos();
    const Move m = parse_uci_move(p, "e2e4");
    EXPECT_EQ(m.uci(), "e2e4");
    EXPECT_THROW(parse_uci_move(p, "e2e5"), IllegalMoveError);
    EXPECT_THROW(parse_uci_move(p, "zz"), IllegalMoveError);
    EXPECT_THROW(apply_move(p, Move{Square(4, 1), Square(4, 4)}), IllegalMoveError);
}

TEST(Moves, CastlingAndPromotionFlags) {
    const Position p = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
    const Move oo = parse_uci_move(p, "e1g1");
    EXPECT_TRUE(oo.is_castle);
    const Position q = apply_move(p, oo);
    EXPECT_EQ(q.piece_at(Square(5, 0))->second, PieceType::rook);
    EXPECT_FALSE(q.can_castle(Color::white, true));
    EXPECT_FALSE(q.can_castle(Color::white, false));
    EXPECT_TRUE(q.can_castle(Color::black, true));

    const Position pr = parse_fen("8/P6k/8/8/8/8/8/K7 w - - 0 1");
    const Move promo = parse_uci_move(pr, "a7a8n");
    EXPECT_EQ(promo.promotion, Promotion::knight);
    EXPECT_EQ(apply_move(pr, promo).piece_at(Square(0, 7))->second, PieceType::knight);
}

TEST(Moves, EnPassantOnlyWhenLegal) {
    // d5 pawn pinned horizontally against the king: the ep capture is illegal.
    const Position pinned = parse_fen("8/8/8/K2pP2r/8/8/8/7k w - d6 0 1");
    EXPECT_FALSE(en_passant_capturable(pinned));
    const Position free = parse_fen("8/8/8/3pP3/8/8/8/K6k w - d6 0 1");
    EXPECT_TRUE(en_passant_capturable(free));
    const Move ep = parse_uci_move(free, "e5d6");
    EXPECT_TRUE(ep.is_en_passant);
    EXPECT_FALSE(apply_move(free, ep).piece_at(Square(3, 4)).has_value());
}

TEST(Status, CheckmateStalemateAndDraws) {
    EXPECT_EQ(game_status(parse_fen("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1")), GameStatus::checkmate);
    EXPECT_EQ(game_status(parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")), GameStatus::stalemate);
    EXPECT_EQ(game_status(parse_fen("7k/8/6K1/8/8/8/8/6B1 w - - 0 1")), GameStatus::draw_insufficient_material);
    EXPECT_EQ(game_status(parse_fen("7k/8/6K1/8/8/8/8/5BB1 w - - 0 1")), GameStatus::ongoing);
    EXPECT_EQ(game_status(parse_fen("7k/8/6K1/8/8/8/8/6R1 w - - 100 80")), GameStatus::draw_fifty_move);
    // Same-colored bishops on both sides cannot mate.
    EXPECT_EQ(game_status(parse_fen("7k/8/6K1/8/8/8/b7/7B w - - 0 1")), GameStatus::draw_insufficient_material);
    EXPECT_EQ(game_status(Position::startpos()), GameStatus::ongoing);
}

TEST(Status, ThreefoldByKnightShuffle) {
    Position p = Position::startpos();
    for (int round = 0; round < 2; ++round)
        for (const char* m : {"g1f3", "g8f6", "f3g1", "f6g8"}) p = apply_move(p, parse_uci_move(p, m));
    EXPECT_EQ(p.repetition_count(), 2);
    EXPECT_EQ(game_status(p), GameStatus::draw_threefold);
}

TEST(Status, RepetitionCountAfterOneCycle) {
    Position p = Position::startpos();
    for (const char* m : {"g1f3", "g8f6", "f3g1", "f6g8"}) p = apply_move(p, parse_uci_move(p, m));
    EXPECT_EQ(p.repetition_count(), 1);
    EXPECT_EQ(game_status(p), GameStatus::ongoing);
}

TEST(Position, ZobristMatchesAfterTransposition) {
    Position a = Position::startpos(), b = Position::startpos();
    for (const char* m : {"g1f3", "g8f6", "b1c3"}) a = apply_move(a, parse_uci_move(a, m));
    for (const char* m : {"b1c3", "g8f6", "g1f3"}) b = apply_move(b, parse_uci_move(b, m));
    EXPECT_EQ(a.key(), b.key());
    EXPECT_EQ(a.key(), parse_fen(emit_fen(a)).key());
}

TEST(Position, MoveTrailKeepsLastEightNewestFirst) {
    Position p = Position::startpos();
    const char* line[] = {"e2e4", "e7e5", "g1f3", "b8c6", "f1b5", "a7a6", "b5a4", "g8f6", "e1g1", "f8e7"};
    for (const char* m : line) p = apply_move(p, parse_uci_move(p, m));
    const auto trail = p.move_trail();
    ASSERT_EQ(trail.size(), 8u);
    EXPECT_EQ(trail[0].uci(), "f8e7");
    EXPECT_EQ(trail[7].uci(), "g1f3");
}

TEST(Position, MirrorIsAnInvolutionOnBoards) {
    for (const auto& p : fxtest::random_positions(200, 5)) {
        const Position m = mirror(p);
        EXPECT_EQ(m.side_to_move(), ~p.side_to_move());
        EXPECT_EQ(emit_fen(mirror(m)), emit_fen(p));
        EXPECT_EQ(legal_moves(m).size(), legal_moves(p).size());
        EXPECT_EQ(game_status(m), game_status(p));
    }
}

TEST(San, DisambiguationChecksAndMates) {
    const Position p = parse_fen("2k5/8/8/8/8/8/8/R3K2R w KQ - 0 1");
    EXPECT_EQ(to_san(p, parse_uci_move(p, "a1d1")), "Rd1");
    EXPECT_EQ(to_san(p, parse_uci_move(p, "h1h7")), "Rh7");
    EXPECT_EQ(to_san(p, parse_uci_move(p, "e1g1")), "O-O");
    EXPECT_EQ(to_san(p, parse_uci_move(p, "e1c1")), "O-O-O");
    const Position d = parse_fen("2k5/8/8/8/8/8/4K3/R6R w - - 0 1");
    EXPECT_EQ(to_san(d, parse_uci_move(d, "a1d1")), "Rad1");
    EXPECT_EQ(to_san(d, parse_uci_move(d, "h1h8")), "Rh8+");
    const Position m = parse_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
    EXPECT_EQ(to_san(m, parse_uci_move(m, "a1a8")), "Ra8#");
    const Position s = Position::startpos();
    EXPECT_EQ(to_san(s, parse_uci_move(s, "g1f3")), "Nf3");
    const Position promo = parse_fen("8/P6k/8/8/8/8/8/K7 w - - 0 1");
    EXPECT_EQ(to_san(promo, parse_uci_move(promo, "a7a8q")), "a8=Q");
}

TEST(Square, ParsingAndColors) {
    EXPECT_EQ(Square::parse("e4")->index(), 28);
    EXPECT_FALSE(Square::parse("i1").has_value());
    EXPECT_FALSE(Square(0, 0).is_light());
    EXPECT_TRUE(Square(7, 0).is_light());
    EXPECT_THROW(Square(8, 0), std::out_of_range);
}
