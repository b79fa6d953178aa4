#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fxchess/chess/position.hpp"
#include "fxchess/inference.hpp"
#include "fxchess/mcts.hpp"

namespace fxchess {

enum class EvaluatorKind { material, network };

struct EngineConfig {
    std::string name = "engine";
    EvaluatorKind kind = EvaluatorKind::material;
    std::string network_path;
    InputVersion version = InputVersion::v2;
    int budget = 64;
    double c_puct = kDefaultCPuct;
    std::uint64_t seed = 0;
    /// Resolved evaluator; built from kind/network_path on demand when empty.
    std::shared_ptr<const Evaluator> evaluator;

    void validate() const {
        if (budget < 1) throw std::invalid_argument("engine '" + name + "': budget must be >= 1");
        if (kind == EvaluatorKind::network && network_path.empty() && !evaluator)
            throw std::invalid_argument("engine '" + name + "': network evaluator needs a weight file");
    }
};

inline std::shared_ptr<const Evaluator> make_evaluator(const EngineConfig& cfg) {
    if (cfg.evaluator) return cfg.evaluator;
    if (cfg.kind == EvaluatorKind::material) return std::make_shared<MaterialEvaluator>();
    auto net = std::make_shared<Network>(load_network(cfg.network_path));
    if (net->version != cfg.version)
        throw std::invalid_argument("engine '" + cfg.name + "': weight file is " + std::string(to_string(net->version)) +
                                    ", config asks for " + std::string(to_string(cfg.version)));
    return std::make_shared<NetworkEvaluator>(std::move(net), cfg.name);
}

inline EngineConfig resolve(EngineConfig cfg) {
    cfg.validate();
    cfg.evaluator = make_evaluator(cfg);
    return cfg;
}

inline EngineConfig engine_from_json(const nlohmann::json& j) {
    EngineConfig c;
    c.name = j.at("name").get<std::string>();
    const std::string eval = j.value("evaluator", std::string("material"));
    if (eval == "material") {
        c.kind = EvaluatorKind::material;
    } else if (eval == "network") {
        c.kind = EvaluatorKind::network;
        c.network_path = j.at("net").get<std::string>();
        c.version = parse_input_version(j.value("version", std::string("V2")));
    } else {
        throw std::invalid_argument("engine '" + c.name + "': unknown evaluator '" + eval + "'");
    }
    c.budget = j.value("budget", c.budget);
    c.c_puct = j.value("c_puct", c.c_puct);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

/// Engine list from {"engines": [...]} or a bare array.
inline std::vector<EngineConfig> load_engines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open engine config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("malformed engine config '" + path + "': " + e.what());
    }
    const auto& arr = j.is_array() ? j : j.at("engines");
    std::vector<EngineConfig> out;
    for (const auto& e : arr) out.push_back(engine_from_json(e));
    return out;
}

// ---------------------------------------------------------------------------
// Games

struct GameRecord {
    std::string white;
    std::string black;
    std::string opening_fen;
    int opening_index = 0;
    int round = 0;
    std::vector<Move> moves;
    GameResult result = GameResult::draw;
    /// Final status; ongoing together with move_limit means adjudicated at max plies.
    GameStatus status = GameStatus::ongoing;
    bool move_limit = false;

    std::string termination() const { return move_limit ? "move_limit" : std::string(to_string(status)); }
};

inline std::string result_token(GameResult r) {
    switch (r) {
    case GameResult::white_win: return "1-0";
    case GameResult::black_win: return "0-1";
    case GameResult::draw: return "1/2-1/2";
    }
    return "*";
}

inline constexpr int kDefaultMaxPlies = 200;

inline GameRecord play_game(const EngineConfig& white, const EngineConfig& black, const Position& opening,
                            int max_plies = kDefaultMaxPlies) {
    if (max_plies < 0) throw std::invalid_argument("max_plies must be >= 0");
    if (game_status(opening) != GameStatus::ongoing) throw std::invalid_argument("opening position is already decided");
    const auto white_eval = make_evaluator(white);
    const auto black_eval = make_evaluator(black);

    GameRecord rec;
    rec.white = white.name;
    rec.black = black.name;
    rec.opening_fen = emit_fen(opening);
    Position pos = opening;
    for (int ply = 0;; ++ply) {
        const auto legal = legal_moves(pos);
        rec.status = game_status(pos, legal);
        if (rec.status != GameStatus::ongoing) break;
        if (ply >= max_plies) {
            rec.move_limit = true;
            break;
        }
        const bool white_moves = pos.side_to_move() == Color::white;
        const EngineConfig& cfg = white_moves ? white : black;
        const auto result = run_search(pos, white_moves ? *white_eval : *black_eval, cfg.budget, cfg.c_puct, cfg.seed);
        const Move mv = result.best_move;
        if (std::find(legal.begin(), legal.end(), mv) == legal.end())
            throw std::logic_error("engine '" + cfg.name + "' produced illegal move " + mv.uci() + " in " + emit_fen(pos));
        rec.moves.push_back(mv);
        pos = apply_move_unchecked(pos, mv);
    }
    if (rec.status == GameStatus::checkmate)
        rec.result = pos.side_to_move() == Color::white ? GameResult::black_win : GameResult::white_win;
    else
        rec.result = GameResult::draw;
    return rec;
}

/// Replays a record from its opening; returns the final status or throws on an illegal move.
inline GameStatus replay(const GameRecord& rec) {
    Position pos = parse_fen(rec.opening_fen);
    for (const Move& m : rec.moves) pos = apply_move(pos, m);
    return game_status(pos);
}

// ---------------------------------------------------------------------------
// Tables and Elo

struct PairStats {
    int wins = 0;
    int draws = 0;
    int losses = 0;

    int games() const { return wins + draws + losses; }
    double score() const { return wins + 0.5 * draws; }
};

struct MatchTable {
    std::vector<std::string> engines;
    /// pairs[i][j]: results of engine i against engine j, from i's side.
    std::vector<std::vector<PairStats>> pairs;

    explicit MatchTable(std::vector<std::string> names = {}) : engines(std::move(names)) {
        pairs.assign(engines.size(), std::vector<PairStats>(engines.size()));
    }

    int index_of(const std::string& name) const {
        const auto it = std::find(engines.begin(), engines.end(), name);
        if (it == engines.end()) throw std::invalid_argument("engine '" + name + "' is not in the table");
        return static_cast<int>(it - engines.begin());
    }

    void add(const GameRecord& g) {
        const int w = index_of(g.white), b = index_of(g.black);
        switch (g.result) {
        case GameResult::white_win: ++pairs[w][b].wins; ++pairs[b][w].losses; break;
        case GameResult::black_win: ++pairs[w][b].losses; ++pairs[b][w].wins; break;
        case GameResult::draw: ++pairs[w][b].draws; ++pairs[b][w].draws; break;
        }
    }

    double total_score(int i) const {
        double s = 0.0;
        for (const auto& p : pairs[i]) s += p.score();
        return s;
    }

    int total_games(int i) const {
        int n = 0;
        for (const auto& p : pairs[i]) n += p.games();
        return n;
    }
};

inline nlohmann::json to_json(const MatchTable& t) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < t.engines.size(); ++i)
        for (std::size_t j = 0; j < t.engines.size(); ++j) {
            const auto& p = t.pairs[i][j];
            if (i == j || p.games() == 0) continue;
            pairs.push_back({{"engine", t.engines[i]}, {"opponent", t.engines[j]}, {"wins", p.wins},
                             {"draws", p.draws}, {"losses", p.losses}});
        }
    nlohmann::json totals = nlohmann::json::object();
    for (std::size_t i = 0; i < t.engines.size(); ++i)
        totals[t.engines[i]] = {{"score", t.total_score(static_cast<int>(i))}, {"games", t.total_games(static_cast<int>(i))}};
    return {{"engines", t.engines}, {"pairs", std::move(pairs)}, {"totals", std::move(totals)}};
}

struct EloEstimate {
    double diff = 0.0;
    double stderr_ = 0.0;
    /// Score rate was 0 or 1; diff holds a bounded sentinel and stderr is infinite.
    bool saturated = false;
};

inline constexpr double kEloSentinel = 800.0;

/// Logistic Elo difference with a delta-method standard error.
inline EloEstimate elo_from_score(double s, int n_games) {
    if (n_games < 1) throw std::invalid_argument("elo_from_score needs at least one game");
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("score rate must lie in [0, 1]");
    if (s == 0.0 || s == 1.0)
        return {s == 1.0 ? kEloSentinel : -kEloSentinel, std::numeric_limits<double>::infinity(), true};
    const double diff = 400.0 * (std::log10(s) - std::log10(1.0 - s));
    const double var = s * (1.0 - s);
    const double se = std::sqrt(var / n_games) * 400.0 / (std::log(10.0) * var);
    return {diff, se, false};
}

/// Elo relative to `baseline` (fixed at 0); engines that never met the baseline are absent.
inline std::map<std::string, std::optional<EloEstimate>> anchor_elo(const MatchTable& t, const std::string& baseline) {
    const int b = t.index_of(baseline);
    std::map<std::string, std::optional<EloEstimate>> out;
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        if (static_cast<int>(i) == b) {
            out[t.engines[i]] = EloEstimate{};
            continue;
        }
        const auto& p = t.pairs[i][b];
        if (p.games() == 0) out[t.engines[i]] = std::nullopt;
        else out[t.engines[i]] = elo_from_score(p.score() / p.games(), p.games());
    }
    return out;
}

/// Lowest total score rate; first in table order on ties.
inline std::string weakest_engine(const MatchTable& t) {
    if (t.engines.empty()) throw std::invalid_argument("empty match table");
    int best = 0;
    double best_rate = 2.0;
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        const int n = t.total_games(static_cast<int>(i));
        const double rate = n ? t.total_score(static_cast<int>(i)) / n : 0.5;
        if (rate < best_rate) {
            best_rate = rate;
            best = static_cast<int>(i);
        }
    }
    return t.engines[best];
}

inline std::string format_elo_table(const MatchTable& t, const std::string& baseline) {
    const auto elo = anchor_elo(t, baseline);
    std::ostringstream os;
    os << "baseline: " << baseline << "\n";
    char buf[160];
    for (const auto& name : t.engines) {
        const int i = t.index_of(name);
        const auto& e = elo.at(name);
        if (!e) std::snprintf(buf, sizeof buf, "%-20s %10s  games %d  score %.1f\n", name.c_str(), "unrated",
                              t.total_games(i), t.total_score(i));
        else if (e->saturated)
            std::snprintf(buf, sizeof buf, "%-20s %+10.1f (saturated)  games %d  score %.1f\n", name.c_str(), e->diff,
                          t.total_games(i), t.total_score(i));
        else
            std::snprintf(buf, sizeof buf, "%-20s %+10.1f +/- %.1f  games %d  score %.1f\n", name.c_str(), e->diff,
                          e->stderr_, t.total_games(i), t.total_score(i));
        os << buf;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Round robin

struct Tournament {
    std::vector<GameRecord> games;
    MatchTable table;
};

/// Every unordered engine pair plays each opening `games_per_opening` times with each color.
inline Tournament round_robin(std::vector<EngineConfig> engines, const std::vector<Position>& openings,
                              int games_per_opening = 1, int max_plies = kDefaultMaxPlies, int threads = 1) {
    if (engines.size() < 2) throw std::invalid_argument("round robin needs at least two engines");
    if (openings.empty()) throw std::invalid_argument("round robin needs at least one opening");
    if (games_per_opening < 1) throw std::invalid_argument("games per opening must be >= 1");
    std::vector<std::string> names;
    for (auto& e : engines) {
        e = resolve(std::move(e));
        if (std::find(names.begin(), names.end(), e.name) != names.end())
            throw std::invalid_argument("duplicate engine name '" + e.name + "'");
        names.push_back(e.name);
    }

    struct Job {
        int white, black, opening, round;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < engines.size(); ++i)
        for (std::size_t j = i + 1; j < engines.size(); ++j)
            for (std::size_t o = 0; o < openings.size(); ++o)
                for (int g = 0; g < games_per_opening; ++g) {
                    jobs.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(o), g});
                    jobs.push_back({static_cast<int>(j), static_cast<int>(i), static_cast<int>(o), g});
                }

    std::vector<GameRecord> games(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
            try {
                const Job& job = jobs[k];
                games[k] = play_game(engines[job.white], engines[job.black], openings[job.opening], max_plies);
                games[k].opening_index = job.opening;
                games[k].round = static_cast<int>(k) + 1;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Tournament out{std::move(games), MatchTable(names)};
    for (const auto& g : out.games) out.table.add(g);
    return out;
}

// ---------------------------------------------------------------------------
// Openings and PGN

inline std::vector<Position> parse_openings(std::istream& in, const std::string& source = "openings") {
    std::vector<Position> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto fields = detail::split_ws(line);
        // EPD records carry four board fields followed by opcodes; FEN records may add the two clocks.
        std::string fen;
        std::size_t take = std::min<std::size_t>(fields.size(), 6);
        if (take > 4) {
            auto is_number = [](std::string_view s) {
                return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
            };
            if (!is_number(fields[4])) take = 4;
            else if (take == 6 && !is_number(fields[5])) take = 5;
        }
        for (std::size_t i = 0; i < take; ++i) {
            if (i) fen += ' ';
            fen += fields[i];
        }
        try {
            out.push_back(parse_fen(fen));
        } catch (const std::exception& e) {
            throw std::runtime_error(source + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (out.empty()) throw std::runtime_error(source + ": no openings");
    return out;
}

inline std::vector<Position> load_openings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open openings file '" + path + "'");
    return parse_openings(in, path);
}

inline void write_pgn(const std::vector<GameRecord>& records, std::ostream& os, const std::string& event = "fxchess arena") {
    const std::string start = emit_fen(Position::startpos());
    for (const auto& rec : records) {
        os << "[Event \"" << event << "\"]\n"
           << "[Site \"?\"]\n"
           << "[Date \"????.??.??\"]\n"
           << "[Round \"" << rec.round << "\"]\n"
           << "[White \"" << rec.white << "\"]\n"
           << "[Black \"" << rec.black << "\"]\n"
           << "[Result \"" << result_token(rec.result) << "\"]\n";
        Position pos = parse_fen(rec.opening_fen);
        if (rec.opening_fen != start) os << "[SetUp \"1\"]\n[FEN \"" << rec.opening_fen << "\"]\n";
        os << "[Termination \"" << rec.termination() << "\"]\n\n";

        std::string text;
        std::size_t line_len = 0;
        auto emit = [&](const std::string& tok) {
            if (line_len && line_len + 1 + tok.size() > 79) {
                text += '\n';
                line_len = 0;
            } else if (line_len) {
                text += ' ';
                ++line_len;
            }
            text += tok;
            line_len += tok.size();
        };
        for (std::size_t i = 0; i < rec.moves.size(); ++i) {
            if (pos.side_to_move() == Color::white) emit(std::to_string(pos.fullmove_number()) + ".");
            else if (i == 0) emit(std::to_string(pos.fullmove_number()) + "...");
            emit(to_san(pos, rec.moves[i]));
            pos = apply_move_unchecked(pos, rec.moves[i]);
        }
        emit(result_token(rec.result));
        os << text << "\n\n";
    }
}

inline void write_pgn(const std::vector<GameRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write PGN file '" + path + "'");
    write_pgn(records, out);
}

}  // namespace fxchess
