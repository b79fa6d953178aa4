#pragma once

#include <cstdint>

namespace fxtest {

/// Expected V2 plane contents for one FEN, produced by tests/oracle/plane_oracle.py.
struct PlaneGolden {
    const char* fen;
    std::uint64_t p1[6];
    std::uint64_t p2[6];
    std::uint64_t p1_mask, p2_mask, checkers;
    bool ocb;
    double diff[5];
    double count[5];
    double no_progress;
    bool castling[4];
    std::uint64_t ep;
};

inline const PlaneGolden kPlaneGolden[] = {
#include "golden/plane_fixtures.inc"
};

}  // namespace fxtest
