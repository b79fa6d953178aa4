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

#include "fxchess/chess/position.hpp"

namespace fxchess {

/// V1 is the classic 39-plane layout; V2 drops color and move count and adds the FX features (52 planes).
enum class InputVersion { v1, v2 };

inline std::string_view to_string(InputVersion v) { return v == InputVersion::v1 ? "V1" : "V2"; }

inline InputVersion parse_input_version(std::string_view text) {
    if (text == "V1" || text == "v1") return InputVersion::v1;
    if (text == "V2" || text == "v2") return InputVersion::v2;
    throw std::invalid_argument("unknown input version '" + std::string(text) + "' (expected V1 or V2)");
}

enum class ChannelKind { boolean, integer };
enum class ChannelOwner { p1, p2, global };

struct ChannelDescriptor {
    int index = 0;
    std::string name;
    ChannelKind kind = ChannelKind::boolean;
    ChannelOwner owner = ChannelOwner::global;
    /// One value across the whole 8x8 plane.
    bool uniform = false;
};

/// Scaling constants for the int planes.
namespace plane_norms {
inline constexpr double no_progress = 50.0;
inline constexpr double total_moves = 500.0;
/// Initial per-side army: pawn, knight, bishop, rook, queen.
inline constexpr std::array<double, 5> material = {8.0, 2.0, 2.0, 2.0, 1.0};
}  // namespace plane_norms

namespace detail {

constexpr std::array<std::string_view, 6> kPieceNames = {"PAWN", "KNIGHT", "BISHOP", "ROOK", "QUEEN", "KING"};

/// First channel of each feature group; -1 when the group is absent from the layout.
struct PlaneOffsets {
    int p1_pieces, p2_pieces, repetitions, en_passant, color, total_moves, p1_castling, p2_castling,
        no_progress, last_moves, is960, p1_mask, p2_mask, checkerboard, material_diff, opposite_bishops,
        checkers, material_count, total;
};

constexpr PlaneOffsets offsets_for(InputVersion v) {
    if (v == InputVersion::v1)
        return {0, 6, 12, 14, 15, 16, 17, 19, 21, 22, 38, -1, -1, -1, -1, -1, -1, -1, 39};
    return {0, 6, 12, 14, -1, -1, 15, 17, 19, 20, 36, 37, 38, 39, 40, 45, 46, 47, 52};
}

}  // namespace detail

inline int channel_count(InputVersion v) { return detail::offsets_for(v).total; }

inline std::vector<ChannelDescriptor> plane_layout(InputVersion version) {
    using K = ChannelKind;
    using O = ChannelOwner;
    std::vector<ChannelDescriptor> out;
    auto add = [&out](std::string name, K kind, O owner, bool uniform) {
        out.push_back({static_cast<int>(out.size()), std::move(name), kind, owner, uniform});
    };
    for (auto p : detail::kPieceNames) add("P1 " + std::string(p), K::boolean, O::p1, false);
    for (auto p : detail::kPieceNames) add("P2 " + std::string(p), K::boolean, O::p2, false);
    add("Repetitions 1", K::boolean, O::global, true);
    add("Repetitions 2", K::boolean, O::global, true);
    add("En-passant square", K::boolean, O::global, false);
    if (version == InputVersion::v1) {
        add("Color", K::boolean, O::global, true);
        add("Total move count", K::integer, O::global, true);
    }
    add("P1 castling KING_SIDE", K::boolean, O::p1, true);
    add("P1 castling QUEEN_SIDE", K::boolean, O::p1, true);
    add("P2 castling KING_SIDE", K::boolean, O::p2, true);
    add("P2 castling QUEEN_SIDE", K::boolean, O::p2, true);
    add("No-progress count", K::integer, O::global, true);
    for (int i = 1; i <= 8; ++i) {
        add("Last move " + std::to_string(i) + " origin", K::boolean, O::global, false);
        add("Last move " + std::to_string(i) + " target", K::boolean, O::global, false);
    }
    add("is960", K::boolean, O::global, true);
    if (version == InputVersion::v2) {
        add("P1 mask", K::boolean, O::p1, false);
        add("P2 mask", K::boolean, O::p2, false);
        add("Checkerboard", K::boolean, O::global, false);
        for (int t = 0; t < 5; ++t) add("P1 material difference " + std::string(detail::kPieceNames[t]), K::integer, O::p1, true);
        add("Opposite color bishops", K::boolean, O::global, true);
        add("Checkers", K::boolean, O::p2, false);
        for (int t = 0; t < 5; ++t) add("P1 material count " + std::string(detail::kPieceNames[t]), K::integer, O::p1, true);
    }
    return out;
}

/// channels x 8 x 8 values, channel-major, rank 0 first within a channel.
struct PlaneStack {
    InputVersion version = InputVersion::v2;
    int channels = 0;
    std::vector<double> data;

    static PlaneStack zeros(InputVersion v) {
        const int c = channel_count(v);
        return PlaneStack{v, c, std::vector<double>(static_cast<std::size_t>(c) * 64, 0.0)};
    }

    double& at(int channel, int square) { return data[static_cast<std::size_t>(channel) * 64 + square]; }
    double at(int channel, int square) const { return data[static_cast<std::size_t>(channel) * 64 + square]; }

    std::span<const double> plane(int channel) const {
        return {data.data() + static_cast<std::size_t>(channel) * 64, 64};
    }

    std::size_t size() const { return data.size(); }

    bool same_shape(const PlaneStack& other) const { return version == other.version && channels == other.channels; }

    bool operator==(const PlaneStack&) const = default;
};

/// Encodes from the mover's perspective: P1 is the side to move and, when black moves,
/// every square-indexed plane is rank-flipped.
inline PlaneStack encode(const Position& pos, InputVersion version) {
    const auto off = detail::offsets_for(version);
    PlaneStack out = PlaneStack::zeros(version);
    const Color us = pos.side_to_move();
    const Color them = ~us;
    const bool flip = us == Color::black;

    auto frame = [flip](Bitboard b) { return flip ? flip_ranks(b) : b; };
    auto frame_sq = [flip](Square s) { return flip ? s.flipped() : s; };
    auto set_bits = [&out](int channel, Bitboard b) {
        for (; b; b &= b - 1) out.at(channel, lsb(b)) = 1.0;
    };
    auto set_all = [&out](int channel, double v) {
        std::fill_n(out.data.begin() + static_cast<std::ptrdiff_t>(channel) * 64, 64, v);
    };

    for (int t = 0; t < 6; ++t) {
        set_bits(off.p1_pieces + t, frame(pos.pieces(us, static_cast<PieceType>(t))));
        set_bits(off.p2_pieces + t, frame(pos.pieces(them, static_cast<PieceType>(t))));
    }
    if (pos.repetition_count() >= 1) set_all(off.repetitions, 1.0);
    if (pos.repetition_count() >= 2) set_all(off.repetitions + 1, 1.0);
    if (en_passant_capturable(pos)) set_bits(off.en_passant, frame_sq(*pos.en_passant_square()).bit());

    if (version == InputVersion::v1) {
        if (us == Color::white) set_all(off.color, 1.0);
        set_all(off.total_moves, std::clamp(pos.fullmove_number() / plane_norms::total_moves, 0.0, 1.0));
    }

    if (pos.can_castle(us, true)) set_all(off.p1_castling, 1.0);
    if (pos.can_castle(us, false)) set_all(off.p1_castling + 1, 1.0);
    if (pos.can_castle(them, true)) set_all(off.p2_castling, 1.0);
    if (pos.can_castle(them, false)) set_all(off.p2_castling + 1, 1.0);

    set_all(off.no_progress, std::clamp(pos.halfmove_clock() / plane_norms::no_progress, 0.0, 1.0));

    const auto trail = pos.move_trail();
    for (std::size_t i = 0; i < trail.size(); ++i) {
        set_bits(off.last_moves + 2 * static_cast<int>(i), frame_sq(trail[i].from).bit());
        set_bits(off.last_moves + 2 * static_cast<int>(i) + 1, frame_sq(trail[i].to).bit());
    }
    // is960 stays zero: standard chess only.

    if (version == InputVersion::v2) {
        set_bits(off.p1_mask, frame(pos.occupancy(us)));
        set_bits(off.p2_mask, frame(pos.occupancy(them)));
        for (int s = 0; s < 64; ++s)
            if (((s & 7) + (s >> 3)) % 2 == 0) out.at(off.checkerboard, s) = 1.0;

        for (int t = 0; t < 5; ++t) {
            const auto type = static_cast<PieceType>(t);
            const double mine = pos.material_count(us, type);
            const double theirs = pos.material_count(them, type);
            set_all(off.material_diff + t, std::clamp((mine - theirs) / plane_norms::material[t], -1.0, 1.0));
            set_all(off.material_count + t, std::clamp(mine / plane_norms::material[t], 0.0, 1.0));
        }

        const Bitboard wb = pos.pieces(Color::white, PieceType::bishop);
        const Bitboard bb = pos.pieces(Color::black, PieceType::bishop);
        if (popcount(wb) == 1 && popcount(bb) == 1 &&
            Square::from_index(lsb(wb)).is_light() != Square::from_index(lsb(bb)).is_light())
            set_all(off.opposite_bishops, 1.0);

        set_bits(off.checkers, frame(checkers(pos)));
    }
    return out;
}

namespace detail {

inline std::string format_plane_value(double v) {
    char buf[32];
    if (v == std::floor(v)) std::snprintf(buf, sizeof buf, "%.1f", v);
    else std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

/// Channel-by-channel text dump, one line per channel. Square names are in the encoder frame.
inline std::string describe(const PlaneStack& stack) {
    const auto layout = plane_layout(stack.version);
    if (static_cast<int>(layout.size()) != stack.channels) throw std::invalid_argument("plane stack does not match its layout");
    std::string out = "input " + std::string(to_string(stack.version)) + ", " + std::to_string(stack.channels) + " channels\n";
    for (const auto& d : layout) {
        const auto plane = stack.plane(d.index);
        out += "[" + std::to_string(d.index) + "] " + d.name + " (" +
               (d.kind == ChannelKind::boolean ? "bool" : "int") + "): ";
        const bool constant = std::all_of(plane.begin(), plane.end(), [&](double v) { return v == plane[0]; });
        if (constant) {
            out += "constant " + detail::format_plane_value(plane[0]);
        } else {
            int ones = 0;
            std::string squares;
            for (int s = 0; s < 64; ++s) {
                if (plane[s] == 0.0) continue;
                ++ones;
                squares += ' ' + Square::from_index(s).name();
            }
            if (d.name == "Checkerboard") out += "constant pattern, " + std::to_string(ones) + " ones";
            else out += std::to_string(ones) + " ones:" + squares;
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const PlaneStack& stack) {
    const auto layout = plane_layout(stack.version);
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& d : layout) {
        const auto plane = stack.plane(d.index);
        channels.push_back({{"index", d.index},
                            {"name", d.name},
                            {"kind", d.kind == ChannelKind::boolean ? "bool" : "int"},
                            {"values", std::vector<double>(plane.begin(), plane.end())}});
    }
    return {{"version", std::string(to_string(stack.version))}, {"channels", std::move(channels)}};
}

}  // namespace fxchess
