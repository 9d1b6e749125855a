// cisg: run coordination protocols over .cisg game files and query the
// brute-force oracles.
//
//   cisg run    --game G --protocol P --monitoring M --seed a..b --steps N ...
//   cisg oracle --game G [--epsilon e1 e2 ...]
//
// Exit codes: 0 success, 2 configuration error (no artifacts written),
// 3 runtime fault.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cisg/coordination.hpp"
#include "cisg/game_io.hpp"
#include "cisg/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cisg;

namespace {

struct ExperimentConfig {
    std::string game_path;
    std::string protocol;
    std::string monitoring = "imperfect";
    double epsilon = 0.1;
    double delta = 0.1;
    double gamma = 0.1;
    std::optional<int> t_mix;
    std::optional<std::int64_t> k1_override;
    int bound = 1;
    std::string seed_spec = "0";
    long steps = 0;
    bool with_oracle = false;
    std::string out_dir;
};

const std::vector<std::string> kProtocols = {"case1",  "case2", "case3",
                                             "case4",  "case5", "case6",
                                             "repeated", "rmax-single"};

// "a..b" (inclusive), "a,b,c", or a single integer
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(spec.substr(0, dots));
        const std::uint64_t hi = std::stoull(spec.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("seed range is empty: " + spec);
        std::vector<std::uint64_t> out;
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::vector<std::uint64_t> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    if (out.empty()) throw std::invalid_argument("no seeds in: " + spec);
    return out;
}

json config_snapshot(const ExperimentConfig& c) {
    json j;
    j["game"] = c.game_path;
    j["protocol"] = c.protocol;
    j["monitoring"] = c.monitoring;
    j["epsilon"] = c.epsilon;
    j["delta"] = c.delta;
    j["gamma"] = c.gamma;
    if (c.t_mix) j["t_mix"] = *c.t_mix;
    if (c.k1_override) j["k1_override"] = *c.k1_override;
    j["bound"] = c.bound;
    j["seed"] = c.seed_spec;
    j["steps"] = c.steps;
    j["oracle"] = c.with_oracle;
    j["out"] = c.out_dir;
    return j;
}

struct SeedResult {
    RunLog log;
    int switches = 0;
};

SeedResult run_one(const Cisg& game, const ExperimentConfig& c, std::uint64_t seed) {
    const Monitoring mon =
        c.monitoring == "perfect" ? Monitoring::perfect : Monitoring::imperfect;
    RmaxConfig rmax_cfg;
    rmax_cfg.epsilon = c.epsilon;
    rmax_cfg.delta = c.delta;
    rmax_cfg.t_mix = c.t_mix.value_or(1);
    rmax_cfg.r_max = game.r_max();
    rmax_cfg.k1_override = c.k1_override;

    auto finish = [&](auto& controllers) {
        std::vector<AgentController*> ptrs;
        for (auto& ctrl : controllers) ptrs.push_back(ctrl.get());
        SeedResult r;
        r.log = run_simulation(game, ptrs, mon, seed, c.steps);
        for (const auto& ctrl : controllers)
            r.switches = std::max(r.switches, ctrl->switch_count());
        return r;
    };

    if (c.protocol == "rmax-single")
        return {run_rmax(induce_mdp(game), rmax_cfg, seed, c.steps), 0};
    if (c.protocol == "case1") {
        auto cs = make_case1_controllers(game, game.canonical_indexing(), rmax_cfg);
        return finish(cs);
    }
    if (c.protocol == "case2") {
        std::vector<int> order(game.num_agents());
        for (int i = 0; i < game.num_agents(); ++i) order[i] = i;
        auto cs = make_case2_controllers(game, order, rmax_cfg);
        return finish(cs);
    }
    if (c.protocol == "case3") {
        auto cs = make_case3_controllers(game, rmax_cfg);
        return finish(cs);
    }
    if (c.protocol == "case4") {
        auto sched = compute_schedule(c.epsilon, c.delta, c.gamma, game.r_max(),
                                      game.num_agents(), *c.t_mix);
        auto cs = make_case4_controllers(game, sched, rmax_cfg);
        return finish(cs);
    }
    if (c.protocol == "case5") {
        auto sched = compute_schedule(c.epsilon, c.delta, c.gamma, game.r_max(),
                                      game.num_agents(), *c.t_mix, c.bound);
        auto cs = make_case5_controllers(game, sched, rmax_cfg);
        return finish(cs);
    }
    if (c.protocol == "case6") {
        auto cs = make_case6_controllers(game, c.epsilon, c.delta, c.gamma, c.bound,
                                         c.k1_override);
        return finish(cs);
    }
    // repeated
    auto cs = make_repeated_controllers(game);
    return finish(cs);
}

int cmd_run(const ExperimentConfig& c) {
    // validate everything before touching the filesystem
    std::vector<std::uint64_t> seeds;
    std::optional<Cisg> loaded;
    try {
        seeds = parse_seeds(c.seed_spec);
        loaded = load_game_file(c.game_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const Cisg& game = *loaded;
    if (c.protocol == "case3" && c.monitoring != "perfect") {
        std::cerr << "error: case3 requires perfect monitoring\n";
        return 2;
    }
    const bool needs_t_mix = c.protocol == "case1" || c.protocol == "case2" ||
                             c.protocol == "case3" || c.protocol == "case4" ||
                             c.protocol == "case5" || c.protocol == "rmax-single";
    if (needs_t_mix && !c.t_mix) {
        std::cerr << "error: --t-mix is required for " << c.protocol << "\n";
        return 2;
    }
    if (c.protocol == "case6" && c.t_mix) {
        std::cerr << "error: --t-mix is forbidden for case6 (the protocol "
                     "searches over assumed mixing times)\n";
        return 2;
    }
    if (c.protocol == "repeated" && game.num_states() != 1) {
        std::cerr << "error: repeated requires a single-state game\n";
        return 2;
    }
    if (c.steps < 1) {
        std::cerr << "error: --steps must be positive\n";
        return 2;
    }

    std::optional<Metrics> oracle_probe;
    try {
        fs::create_directories(c.out_dir);
        std::ofstream(fs::path(c.out_dir) / "config.json")
            << config_snapshot(c).dump(2) << "\n";

        std::ofstream summary(fs::path(c.out_dir) / "summary.csv");
        summary << "seed,steps,final_avg,v_opt,target,time_to_target,switches\n";
        for (std::uint64_t seed : seeds) {
            SeedResult r = run_one(game, c, seed);
            const fs::path dir = fs::path(c.out_dir) / ("seed_" + std::to_string(seed));
            fs::create_directories(dir);
            std::ofstream(dir / "runlog.csv") << r.log.to_csv();

            summary << seed << "," << r.log.steps() << "," << r.log.running_average();
            if (c.with_oracle) {
                Metrics m = evaluate_against_oracle(r.log, game, c.epsilon, c.gamma);
                summary << "," << m.v_opt << "," << m.target << ",";
                if (m.time_to_target) summary << *m.time_to_target;
                oracle_probe = m;
            } else {
                summary << ",,,";
            }
            summary << "," << r.switches << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return 3;
    }
    std::cout << "wrote " << seeds.size() << " run(s) to " << c.out_dir << "\n";
    if (oracle_probe) std::cout << "v(M) = " << oracle_probe->v_opt << "\n";
    return 0;
}

int cmd_oracle(const std::string& game_path, const std::vector<double>& eps_list) {
    std::optional<Cisg> loaded;
    try {
        loaded = load_game_file(game_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const Cisg& game = *loaded;
    try {
        auto erg = check_ergodic(game);
        if (!erg.ergodic) {
            std::cout << "ergodic: no\n";
            std::cout << "witness policy (state -> joint action index):";
            for (int a : erg.witness_policy) std::cout << " " << a;
            std::cout << "\nunreachable: state " << erg.unreachable_to
                      << " from state " << erg.unreachable_from << "\n";
            std::cout << "v(M): skipped (defined only for ergodic games)\n";
            return 0;
        }
        std::cout << "ergodic: yes\n";
        const InducedMdp mdp = induce_mdp(game);
        auto report = optimal_value_oracle(mdp);
        std::cout << "v(M) = " << report.optimal_value << "\n";
        const auto& ix = game.canonical_indexing();
        std::cout << "argmax policy:\n";
        for (int s = 0; s < game.num_states(); ++s) {
            const JointAction ja = ix.decode(report.argmax_policy.action_at[s]);
            std::cout << "  state " << s << ": joint action";
            for (int a : ja.components) std::cout << " " << a;
            std::cout << "\n";
        }
        for (double eps : eps_list) {
            auto cap = default_mixing_cap(
                game.num_states(),
                *std::max_element(game.action_counts().begin(),
                                  game.action_counts().end()),
                game.r_max(), eps);
            auto t = epsilon_mixing_time(mdp, report.argmax_policy, eps, cap);
            std::cout << "mixing time (eps=" << eps << "): ";
            if (t)
                std::cout << *t << "\n";
            else
                std::cout << "none within cap " << cap << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"common-interest stochastic game simulator"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    auto* run = app.add_subcommand("run", "run a protocol over a seed sweep");
    run->add_option("--game", cfg.game_path, "game file (.cisg)")->required();
    run->add_option("--protocol", cfg.protocol, "protocol")
        ->required()
        ->check(CLI::IsMember(kProtocols));
    run->add_option("--monitoring", cfg.monitoring, "perfect or imperfect")
        ->check(CLI::IsMember({"perfect", "imperfect"}));
    run->add_option("--epsilon", cfg.epsilon, "accuracy parameter");
    run->add_option("--delta", cfg.delta, "failure probability");
    run->add_option("--gamma", cfg.gamma, "approximation factor");
    run->add_option("--t-mix", cfg.t_mix, "assumed eps-return mixing time");
    run->add_option("--k1-override", cfg.k1_override,
                    "visit-count threshold override");
    run->add_option("--bound", cfg.bound, "shared bound b on action-set sizes");
    run->add_option("--seed", cfg.seed_spec, "seed, list (a,b,c) or range (a..b)");
    run->add_option("--steps", cfg.steps, "steps per run")->required();
    run->add_flag("--oracle", cfg.with_oracle,
                  "score each run against the brute-force optimal value");
    run->add_option("--out", cfg.out_dir, "output directory")->required();

    std::string oracle_game;
    std::vector<double> eps_list{0.25, 0.1};
    auto* oracle = app.add_subcommand("oracle", "print oracle values for a game");
    oracle->add_option("--game", oracle_game, "game file (.cisg)")->required();
    oracle->add_option("--epsilon", eps_list, "mixing-time epsilon values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (run->parsed()) return cmd_run(cfg);
    return cmd_oracle(oracle_game, eps_list);
}
