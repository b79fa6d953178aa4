// Searches a position with the material evaluator and prints the visit distribution.
//   sample_search [fen] [budget]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "fxchess/fxchess.hpp"

int main(int argc, char** argv) {
    using namespace fxchess;
    const Position pos = argc > 1 ? parse_fen(argv[1]) : Position::startpos();
    const int budget = argc > 2 ? std::atoi(argv[2]) : 256;

    const MaterialEvaluator eval;
    const auto r = run_search(pos, eval, budget);
    const auto policy = visit_policy(r, 1.0);
    std::printf("%s\n", emit_fen(pos).c_str());
    for (std::size_t i = 0; i < r.visit_distribution.size(); ++i) {
        const auto& [move, visits] = r.visit_distribution[i];
        std::printf("  %-6s %-8s N=%-5d pi=%.3f\n", move.uci().c_str(), to_san(pos, move).c_str(), visits, policy[i]);
    }
    std::printf("best %s  value %+.3f  wdl %.3f/%.3f/%.3f  evals %d\n", r.best_move.uci().c_str(), r.root_value,
                r.root_wdl.win, r.root_wdl.draw, r.root_wdl.loss, r.nodes_expanded);
}
