// fxchess command-line front end: UCI engine plus encoder, attribution, arena and netspec helpers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fxchess/fxchess.hpp"

namespace {

using namespace fxchess;

Position position_arg(const std::string& fen) {
    return fen == "startpos" ? Position::startpos() : parse_fen(fen);
}

int cmd_encode(const std::string& fen, const std::string& version, bool text) {
    const auto stack = encode(position_arg(fen), parse_input_version(version));
    if (text) std::cout << describe(stack);
    else std::cout << to_json(stack).dump() << '\n';
    return 0;
}

struct AttributeArgs {
    std::string fen = "startpos";
    std::string net;
    std::string baseline = "zeros";
    std::string positions;
    std::string target = "v";
    int steps = kDefaultIgSteps;
    bool json = false;
};

int cmd_attribute(const AttributeArgs& a) {
    const Network net = load_network(a.net);
    const Position pos = position_arg(a.fen);
    const auto stack = encode(pos, net.version);
    PlaneStack base;
    BaselineKind kind;
    if (a.baseline == "zeros") {
        base = zeros_baseline(net.version);
        kind = BaselineKind::zeros;
    } else if (a.baseline == "mean") {
        if (a.positions.empty()) throw std::invalid_argument("--baseline mean needs --positions <file>");
        base = mean_baseline(load_openings(a.positions), net.version);
        kind = BaselineKind::dataset_mean;
    } else {
        throw std::invalid_argument("unknown baseline '" + a.baseline + "' (expected zeros or mean)");
    }
    const auto target = parse_attribution_target(a.target);
    const auto attr = integrated_gradients(net, stack, base, a.steps, target, kind);
    const auto layout = plane_layout(net.version);
    const auto rows = channel_report(attr, layout);
    if (a.json) {
        auto j = report_to_json(attr, rows);
        j["fen"] = emit_fen(pos);
        j["completeness_residual"] = completeness_residual(net, stack, base, attr);
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "fen " << emit_fen(pos) << "\ntarget " << to_string(target) << ", baseline " << to_string(kind)
                  << ", steps " << a.steps << "\n"
                  << format_report(rows);
        std::printf("sum of attributions %+.6e, completeness residual %.3e\n", attr.total(),
                    completeness_residual(net, stack, base, attr));
    }
    return 0;
}

struct ArenaArgs {
    std::string engines;
    std::string openings;
    std::string out = "arena_out";
    std::string baseline;
    int games = 1;
    int max_plies = kDefaultMaxPlies;
    int threads = 0;
};

int cmd_arena(const ArenaArgs& a) {
    auto engines = load_engines(a.engines);
    const auto openings = load_openings(a.openings);
    const int threads = a.threads > 0 ? a.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto t = round_robin(std::move(engines), openings, a.games, a.max_plies, threads);
    std::filesystem::create_directories(a.out);
    const auto dir = std::filesystem::path(a.out);
    write_pgn(t.games, (dir / "games.pgn").string());
    std::ofstream((dir / "table.json").string()) << to_json(t.table).dump(2) << '\n';
    const std::string baseline = a.baseline.empty() ? weakest_engine(t.table) : a.baseline;
    const std::string elo = format_elo_table(t.table, baseline);
    std::ofstream((dir / "elo.txt").string()) << elo;
    std::cout << t.games.size() << " games written to " << a.out << "\n" << elo;
    return 0;
}

int cmd_netspec(const std::string& name, double alpha, double beta, double phi, bool scaled) {
    if (!name.empty()) {
        std::cout << to_json(alphavile_size(name)).dump() << '\n';
        return 0;
    }
    if (!scaled) throw std::invalid_argument("netspec needs --name or --alpha/--beta");
    const ScalingParams p{alpha, beta, 1.0, phi};
    const auto d = scaled_dimensions(p);
    nlohmann::json j = {{"alpha", alpha},
                        {"beta", beta},
                        {"phi", phi},
                        {"depth", d.depth},
                        {"channels", d.channels},
                        {"adjusted_criterion", adjusted_criterion(p)},
                        {"original_criterion", original_criterion(p)}};
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_gen_random_net(std::uint64_t seed, const std::string& spec, const std::string& version, const std::string& out) {
    const auto net = random_network(seed, spec, parse_input_version(version));
    const std::string text = to_json(net).dump();
    if (out.empty() || out == "-") {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write '" + out + "'");
        f << text << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fxchess: MCTS chess engine with extended input planes and a WDLP value head"};
    app.require_subcommand(0, 1);

    auto* uci = app.add_subcommand("uci", "run the UCI protocol on stdin/stdout (default)");

    std::string fen = "startpos", version = "v2";
    bool text = false;
    auto* enc = app.add_subcommand("encode", "print the input planes of a position");
    enc->add_option("--fen", fen, "FEN or 'startpos'");
    enc->add_option("--version", version, "input version v1 or v2");
    enc->add_flag("--text", text, "human-readable dump instead of JSON");

    AttributeArgs aa;
    auto* att = app.add_subcommand("attribute", "integrated-gradients channel attribution");
    att->add_option("--fen", aa.fen, "FEN or 'startpos'");
    att->add_option("--net", aa.net, "weight file")->required();
    att->add_option("--baseline", aa.baseline, "zeros or mean");
    att->add_option("--positions", aa.positions, "FEN/EPD file for the mean baseline");
    att->add_option("--steps", aa.steps, "Riemann steps")->check(CLI::PositiveNumber);
    att->add_option("--target", aa.target, "v, w, d, l or ply");
    att->add_flag("--json", aa.json, "emit JSON");

    ArenaArgs ar;
    auto* arena = app.add_subcommand("arena", "round-robin tournament");
    arena->add_option("--engines", ar.engines, "engine config JSON")->required();
    arena->add_option("--openings", ar.openings, "FEN/EPD openings file")->required();
    arena->add_option("--games", ar.games, "games per pairing, opening and color")->check(CLI::PositiveNumber);
    arena->add_option("--max-plies", ar.max_plies, "draw adjudication limit")->check(CLI::NonNegativeNumber);
    arena->add_option("--out", ar.out, "output directory");
    arena->add_option("--baseline", ar.baseline, "engine anchored at 0 Elo (default: weakest)");
    arena->add_option("--threads", ar.threads, "worker threads (0 = all cores)");

    std::string net_name;
    double alpha = 1.0, beta = 1.0, phi = 1.0;
    auto* ns = app.add_subcommand("netspec", "network size presets and compound scaling");
    ns->add_option("--name", net_name, "tiny, small, normal or large");
    auto* alpha_opt = ns->add_option("--alpha", alpha, "depth factor");
    auto* beta_opt = ns->add_option("--beta", beta, "width factor");
    ns->add_option("--phi", phi, "compound coefficient");

    std::uint64_t seed = 0;
    std::string spec = "tiny", net_version = "v2", out;
    auto* gen = app.add_subcommand("gen-random-net", "write a seeded random weight file");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--spec", spec, "tiny, small or linear");
    gen->add_option("--version", net_version, "input version v1 or v2");
    gen->add_option("--out", out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*enc) return cmd_encode(fen, version, text);
        if (*att) return cmd_attribute(aa);
        if (*arena) return cmd_arena(ar);
        if (*ns) return cmd_netspec(net_name, alpha, beta, phi, alpha_opt->count() + beta_opt->count() > 0);
        if (*gen) return cmd_gen_random_net(seed, spec, net_version, out);
        (void)uci;
        std::ios::sync_with_stdio(false);
        return uci_loop(std::cin, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
