#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fxchess/arena.hpp"
#include "fxchess/chess/position.hpp"
#include "fxchess/inference.hpp"
#include "fxchess/mcts.hpp"

namespace fxchess {

/// W/D/L per mille, rounded so the three always sum to 1000.
inline std::array<int, 3> wdl_permille(const WdlpOutput& w) {
    int win = static_cast<int>(std::lround(std::clamp(w.win, 0.0, 1.0) * 1000));
    int loss = static_cast<int>(std::lround(std::clamp(w.loss, 0.0, 1.0) * 1000));
    if (win + loss > 1000) loss = 1000 - win;
    return {win, 1000 - win - loss, loss};
}

inline std::string format_info(const SearchResult& r) {
    const auto wdl = wdl_permille(r.root_wdl);
    std::ostringstream os;
    os << "info depth " << r.simulations << " nodes " << r.nodes_expanded << " score cp "
       << std::lround(r.root_value * 100.0) << " wdl " << wdl[0] << ' ' << wdl[1] << ' ' << wdl[2] << " pv "
       << r.best_move.uci();
    return os.str();
}

/// One UCI conversation. Searches run on a worker thread so `stop` can interrupt them.
class EngineSession {
public:
    static constexpr int kDefaultNodes = 400;
    static constexpr int kMaxNodes = 200000;

    explicit EngineSession(std::ostream& out) : out_(out), pos_(Position::startpos()) {
        config_.name = "fxchess";
        config_.budget = kDefaultNodes;
        config_.evaluator = std::make_shared<MaterialEvaluator>();
    }

    ~EngineSession() { finish_search(true); }

    EngineSession(const EngineSession&) = delete;
    EngineSession& operator=(const EngineSession&) = delete;

    /// Processes one line; returns false after `quit`.
    bool handle(const std::string& line) {
        std::istringstream is(line);
        std::string cmd;
        if (!(is >> cmd)) return true;
        if (cmd == "isready") {
            say("readyok");
            return true;
        }
        if (cmd == "stop") {
            finish_search(true);
            return true;
        }
        if (cmd == "quit") {
            finish_search(true);
            return false;
        }
        finish_search(false);
        if (cmd == "uci") {
            say("id name fxchess");
            say("id author fxchess developers");
            say("option name CPuct type string default " + format_double(kDefaultCPuct));
            say("option name Nodes type spin default " + std::to_string(kDefaultNodes) + " min 1 max " +
                std::to_string(kMaxNodes));
            say("option name EvalFile type string default <material>");
            say("option name Encoder type combo default V2 var V1 var V2");
            say("uciok");
        } else if (cmd == "ucinewgame") {
            pos_ = Position::startpos();
        } else if (cmd == "position") {
            handle_position(is);
        } else if (cmd == "go") {
            handle_go(is);
        } else if (cmd == "setoption") {
            handle_setoption(is);
        } else if (cmd == "debug" || cmd == "register") {
        } else {
            say("info string unknown command: " + cmd);
        }
        return true;
    }

    int run(std::istream& in) {
        std::string line;
        while (std::getline(in, line))
            if (!handle(line)) return 0;
        finish_search(false);
        return 0;
    }

    /// Blocks until any running search has printed its bestmove.
    void wait() { finish_search(false); }

    const Position& position() const { return pos_; }
    const EngineConfig& config() const { return config_; }

private:
    static std::string format_double(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    void say(const std::string& s) {
        std::lock_guard lock(out_mutex_);
        out_ << s << '\n' << std::flush;
    }

    void finish_search(bool interrupt) {
        if (!worker_.joinable()) return;
        if (interrupt) stop_.store(true);
        worker_.join();
        stop_.store(false);
    }

    void handle_position(std::istringstream& is) {
        std::string kind;
        is >> kind;
        try {
            Position p = Position::startpos();
            std::string tok;
            if (kind == "fen") {
                std::string fen;
                while (is >> tok && tok != "moves") fen += (fen.empty() ? "" : " ") + tok;
                p = parse_fen(fen);
            } else if (kind == "startpos") {
                is >> tok;
            } else {
                throw std::invalid_argument("expected 'startpos' or 'fen'");
            }
            if (tok == "moves")
                while (is >> tok) p = apply_move(p, parse_uci_move(p, tok));
            else if (!tok.empty() && tok != "moves" && kind == "startpos")
                throw std::invalid_argument("unexpected token '" + tok + "'");
            pos_ = p;
        } catch (const std::exception& e) {
            say(std::string("info string error: ") + e.what());
        }
    }

    double nodes_per_ms() {
        if (!nodes_per_ms_) {
            const auto t0 = std::chrono::steady_clock::now();
            const int probe = 256;
            run_search(Position::startpos(), *config_.evaluator, probe, config_.c_puct, config_.seed);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            nodes_per_ms_ = probe / std::max(ms, 1e-3);
        }
        return *nodes_per_ms_;
    }

    void handle_go(std::istringstream& is) {
        int nodes = config_.budget;
        std::optional<double> movetime;
        std::optional<double> clock;
        bool infinite = false;
        std::string tok;
        const bool white = pos_.side_to_move() == Color::white;
        while (is >> tok) {
            double v = 0;
            if (tok == "infinite") {
                infinite = true;
            } else if (tok == "nodes" && is >> v) {
                nodes = static_cast<int>(std::clamp(v, 1.0, static_cast<double>(kMaxNodes)));
            } else if (tok == "movetime" && is >> v) {
                movetime = v;
            } else if ((tok == "wtime" && white) || (tok == "btime" && !white)) {
                if (is >> v) clock = v;
            } else if (tok == "wtime" || tok == "btime" || tok == "winc" || tok == "binc" || tok == "movestogo" ||
                       tok == "depth" || tok == "mate") {
                is >> v;
            }
        }
        if (!movetime && clock) movetime = *clock / 30.0;
        if (movetime) nodes = static_cast<int>(std::clamp(*movetime * nodes_per_ms(), 1.0, static_cast<double>(kMaxNodes)));
        if (infinite) nodes = kMaxNodes;

        const auto legal = legal_moves(pos_);
        if (game_status(pos_, legal) != GameStatus::ongoing) {
            say("info string position is terminal (" + std::string(to_string(game_status(pos_, legal))) + ")");
            say("bestmove 0000");
            return;
        }
        SearchOptions opt{nodes, config_.c_puct, config_.seed, &stop_};
        worker_ = std::thread([this, pos = pos_, eval = config_.evaluator, opt] {
            try {
                const auto r = run_search(pos, *eval, opt);
                say(format_info(r));
                say("bestmove " + r.best_move.uci());
            } catch (const std::exception& e) {
                say(std::string("info string error: ") + e.what());
                say("bestmove 0000");
            }
        });
    }

    void handle_setoption(std::istringstream& is) {
        std::string tok, name, value;
        is >> tok;
        if (tok != "name") {
            say("info string error: setoption expects 'name'");
            return;
        }
        bool in_value = false;
        while (is >> tok) {
            if (!in_value && tok == "value") {
                in_value = true;
                continue;
            }
            std::string& dst = in_value ? value : name;
            dst += (dst.empty() ? "" : " ") + tok;
        }
        try {
            if (name == "CPuct") {
                const double c = std::stod(value);
                if (!(c >= 0)) throw std::invalid_argument("CPuct must be >= 0");
                config_.c_puct = c;
            } else if (name == "Nodes") {
                const int n = std::stoi(value);
                if (n < 1 || n > kMaxNodes) throw std::invalid_argument("Nodes out of range");
                config_.budget = n;
            } else if (name == "EvalFile") {
                if (value.empty() || value == "<material>") {
                    config_.kind = EvaluatorKind::material;
                    config_.network_path.clear();
                    config_.evaluator = std::make_shared<MaterialEvaluator>();
                } else {
                    auto net = std::make_shared<Network>(load_network(value));
                    config_.kind = EvaluatorKind::network;
                    config_.network_path = value;
                    config_.version = net->version;
                    config_.evaluator = std::make_shared<NetworkEvaluator>(std::move(net));
                }
                nodes_per_ms_.reset();
            } else if (name == "Encoder") {
                const InputVersion v = parse_input_version(value);
                if (config_.kind == EvaluatorKind::network && v != config_.version)
                    throw std::invalid_argument("loaded network expects " + std::string(to_string(config_.version)));
                config_.version = v;
            } else {
                say("info string unknown option: " + name);
            }
        } catch (const std::exception& e) {
            say("info string error: " + name + ": " + e.what());
        }
    }

    std::ostream& out_;
    std::mutex out_mutex_;
    Position pos_;
    EngineConfig config_;
    std::thread worker_;
    std::atomic<bool> stop_{false};
    std::optional<double> nodes_per_ms_;
};

inline int uci_loop(std::istream& in, std::ostream& out) {
    EngineSession session(out);
    return session.run(in);
}

}  // namespace fxchess
