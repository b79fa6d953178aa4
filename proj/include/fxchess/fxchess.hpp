#pragma once

#include "fxchess/chess/position.hpp"
#include "fxchess/planes.hpp"
#include "fxchess/wdlp.hpp"
#include "fxchess/netspec.hpp"
#include "fxchess/inference.hpp"
#include "fxchess/mcts.hpp"
#include "fxchess/attribution.hpp"
#include "fxchess/arena.hpp"
#include "fxchess/uci.hpp"
