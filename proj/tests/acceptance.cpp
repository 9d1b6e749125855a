// Acceptance suite: one test case per criterion, each printing a single
// pass/fail line. Visit-count thresholds use explicit overrides throughout;
// the literal formula threshold (~1.4e7 even for toy games) is exercised as
// a value check, not as a runnable learning configuration.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "cisg/coordination.hpp"
#include "oracles.hpp"

using namespace cisg;

namespace {

void report(int criterion, const char* what, bool ok) {
    std::printf("criterion %2d [%s] %s\n", criterion, ok ? "PASS" : "FAIL", what);
    std::fflush(stdout);
}

std::vector<AgentController*> raw(auto& owned) {
    std::vector<AgentController*> out;
    for (auto& c : owned) out.push_back(c.get());
    return out;
}

RmaxConfig cfg_with(double eps, int t_mix, std::int64_t k1) {
    RmaxConfig cfg;
    cfg.epsilon = eps;
    cfg.delta = 0.1;
    cfg.t_mix = t_mix;
    cfg.r_max = 1.0;
    cfg.k1_override = k1;
    return cfg;
}

} // namespace

TEST_CASE("criterion 1: case-1 emulation equivalence (byte-identical logs)") {
    bool ok = true;
    const RmaxConfig cfg = cfg_with(0.1, 4, 5);
    for (std::uint64_t game_seed = 100; game_seed < 110; ++game_seed) {
        Cisg g = random_ergodic_cisg(4, {2, 2}, 1.0, game_seed);
        const auto& ix = g.canonical_indexing();
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto cs = make_case1_controllers(g, ix, cfg);
            auto team = run_simulation(g, raw(cs), Monitoring::imperfect, seed, 2000);
            auto central = run_case1_centralized(g, ix, cfg, seed, 2000);
            if (team.to_csv() != central.to_csv()) ok = false;
        }
    }
    report(1, "case-1 logs byte-identical to centralized R-MAX (10 games x 20 seeds)", ok);
    CHECK(ok);
}

TEST_CASE("criterion 2: per-step model identity across agents") {
    bool ok = true;
    const RmaxConfig cfg = cfg_with(0.1, 4, 5);
    for (std::uint64_t game_seed = 100; game_seed < 110 && ok; ++game_seed) {
        Cisg g = random_ergodic_cisg(4, {2, 2}, 1.0, game_seed);
        for (std::uint64_t seed = 0; seed < 20 && ok; ++seed) {
            auto cs = make_case1_controllers(g, g.canonical_indexing(), cfg);
            RngStream env = derive_stream(seed, 0);
            int state = 0;
            for (int step = 0; step < 2000; ++step) {
                JointAction joint{{0, 0}};
                for (int i = 0; i < 2; ++i) joint.components[i] = cs[i]->act(state);
                const double payoff = g.reward(state, joint);
                const int next = env.sample(g.transition_row(state, joint));
                for (int i = 0; i < 2; ++i) {
                    Observation obs;
                    obs.state = state;
                    obs.own_action = joint.components[i];
                    obs.payoff = payoff;
                    obs.next_state = next;
                    cs[i]->observe(obs);
                }
                if (!(cs[0]->model() == cs[1]->model())) {
                    ok = false;
                    break;
                }
                state = next;
            }
        }
    }
    report(2, "all agents' models structurally equal at every step", ok);
    CHECK(ok);
}

TEST_CASE("criterion 3: near-optimality with practical K1") {
    int hits = 0;
    const int num_seeds = 30;
    for (std::uint64_t seed = 0; seed < num_seeds; ++seed) {
        Cisg g = random_ergodic_cisg(4, {2, 2}, 1.0, 1000 + seed);
        InducedMdp mdp = induce_mdp(g);
        auto oracle = optimal_value_oracle(mdp);
        auto t_mix = epsilon_mixing_time(mdp, oracle.argmax_policy, 0.1,
                                         default_mixing_cap(4, 2, 1.0, 0.1));
        REQUIRE(t_mix.has_value());
        auto log = run_rmax(mdp, cfg_with(0.1, *t_mix, 10), seed, 50'000);
        if (log.running_average() >= oracle.optimal_value - 0.15) ++hits;
    }
    const bool ok = hits >= 27; // >= 90% of 30 seeds
    std::printf("  (near-optimality hits: %d/30)\n", hits);
    report(3, "running average within 0.15 of v(M) after 50k steps in >=90% of seeds", ok);
    CHECK(ok);
}

TEST_CASE("criterion 4: planning matches brute-force enumeration") {
    bool ok = true;
    RngStream sizes(271828);
    for (int i = 0; i < 50; ++i) {
        const int n = 1 + sizes.next_int(3);
        const int k = 1 + sizes.next_int(4);
        const int horizon = 1 + sizes.next_int(4);
        InducedMdp m = oracles::random_mdp(n, k, 5000 + i);
        auto res = finite_horizon_plan(m, horizon);
        for (int s = 0; s < n; ++s) {
            const double brute = oracles::brute_force_horizon_value(m, s, horizon);
            if (std::abs(res.value[horizon][s] - brute) > 1e-9) ok = false;
        }
    }
    report(4, "finite-horizon values equal exhaustive enumeration within 1e-9 (50 MDPs)", ok);
    CHECK(ok);
}

TEST_CASE("criterion 5: average-reward oracle vs long simulation") {
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Cisg g = random_ergodic_cisg(3, {2, 2}, 1.0, 2000 + seed);
        InducedMdp mdp = induce_mdp(g);
        auto oracle = optimal_value_oracle(mdp);
        const double sim =
            oracles::simulated_average(mdp, oracle.argmax_policy, 777 + seed, 1'000'000);
        if (std::abs(sim - oracle.optimal_value) > 0.02) ok = false;
    }
    report(5, "argmax-policy gain matches 1e6-step simulated average within 0.02", ok);
    CHECK(ok);
}

TEST_CASE("criterion 6: K1 formula spot value") {
    // hand evaluation: ceil(4*2*3*1/0.1)^3 = 240^3 = 13,824,000;
    // ceil(-6 ln^3(0.1/48)) = 1412; max(...) + 1 = 13,824,001
    const bool ok = k1_threshold(2, 2, 3, 1.0, 0.1, 0.1) == 13'824'001;
    report(6, "k1_threshold(2,2,3,1,0.1,0.1) == 13,824,001", ok);
    CHECK(ok);
}

TEST_CASE("criterion 7: case-4 ordering statistics and switch bound") {
    Cisg g = random_ergodic_cisg(2, {2, 2}, 1.0, 3000);
    auto sched = compute_schedule(0.5, 0.2, 0.5, 1.0, 2, /*t_mix=*/1);
    REQUIRE(sched.m == 4);
    const RmaxConfig cfg = cfg_with(0.5, 1, 2);
    int with_identical = 0;
    bool switch_ok = true;
    const int runs = 500;
    for (std::uint64_t seed = 0; seed < runs; ++seed) {
        auto cs = make_case4_controllers(g, sched, cfg);
        run_simulation(g, raw(cs), Monitoring::imperfect, seed,
                       sched.m * sched.t_prime + 200);
        bool identical = false;
        for (int t = 0; t < sched.m; ++t)
            if (cs[0]->trials()[t].agent_order == cs[1]->trials()[t].agent_order)
                identical = true;
        if (identical) ++with_identical;
        for (const auto& c : cs)
            if (c->switch_count() > sched.m - 1) switch_ok = false;
    }
    const double frac = static_cast<double>(with_identical) / runs;
    const bool frac_ok = frac >= 1.0 - 0.2 - 0.05;
    std::printf("  (identical-ordering runs: %.3f, switch bound held: %s)\n", frac,
                switch_ok ? "yes" : "no");
    report(7, "identical-ordering trial in >=75% of runs; switches <= m-1 always",
           frac_ok && switch_ok);
    CHECK(frac_ok);
    CHECK(switch_ok);
}

TEST_CASE("criterion 8: repeated game locks onto the optimum") {
    Cisg g = oracles::load_fixture("coord3x3"); // unique best payoff at (0,0)
    int optimal = 0;
    const int runs = 1000;
    for (std::uint64_t seed = 0; seed < runs; ++seed) {
        auto cs = make_repeated_controllers(g);
        run_simulation(g, raw(cs), Monitoring::imperfect, seed, 27 + 3);
        if (cs[0]->locked_action() == 0 && cs[1]->locked_action() == 0) ++optimal;
    }
    const double frac = static_cast<double>(optimal) / runs;
    const bool ok = frac >= 0.93; // closed form 1 - (8/9)^27 ~ 0.958
    std::printf("  (optimal-lock frequency: %.3f)\n", frac);
    report(8, "post-phase joint action optimal in >=93% of 1000 seeds", ok);
    CHECK(ok);
}

TEST_CASE("criterion 9: case-3 handshake agreement and phase-A length") {
    bool ok = true;
    RngStream sizes(314159);
    const RmaxConfig cfg = cfg_with(0.2, 2, 2);
    for (int i = 0; i < 100; ++i) {
        const int f1 = 1 + sizes.next_int(5);
        const int f2 = 1 + sizes.next_int(5);
        Cisg g = random_ergodic_cisg(2, {f1, f2}, 1.0, 4000 + i);
        auto cs = make_case3_controllers(g, cfg);
        run_simulation(g, raw(cs), Monitoring::perfect, 9000 + i,
                       std::max(f1, f2) + 40);
        for (const auto& c : cs) {
            if (!c->handshake_done() ||
                c->agreed_counts() != std::vector<int>{f1, f2} ||
                c->agreed_order() != cs[0]->agreed_order() ||
                c->phase_a_length() != std::max(f1, f2) + 1)
                ok = false;
        }
    }
    report(9, "both agents agree on correct (order, counts); phase A = max f + 1", ok);
    CHECK(ok);
}

TEST_CASE("criterion 10: ergodicity checker verdicts") {
    bool ok = check_ergodic(oracles::load_fixture("cycle2")).ergodic;
    auto bad = check_ergodic(oracles::load_fixture("nonergodic2"));
    if (bad.ergodic) ok = false;
    if (bad.witness_policy.empty() || bad.unreachable_from == bad.unreachable_to)
        ok = false;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        if (!check_ergodic(random_ergodic_cisg(3, {2, 2}, 1.0, 5000 + seed)).ergodic)
            ok = false;
    report(10, "correct verdicts on hand-built fixtures and generator outputs", ok);
    CHECK(ok);
}

namespace {

// records whether any observation ever carried others_actions
class MonitoringProbe : public AgentController {
public:
    explicit MonitoringProbe(AgentController* inner) : inner_(inner) {}
    void seed(RngStream rng) override { inner_->seed(rng); }
    int act(int state) override { return inner_->act(state); }
    void observe(const Observation& obs) override {
        if (obs.others_actions.has_value()) leaked_ = true;
        inner_->observe(obs);
    }
    std::string phase() const override { return inner_->phase(); }
    std::string poll_event() override { return inner_->poll_event(); }
    bool leaked() const { return leaked_; }

private:
    AgentController* inner_;
    bool leaked_ = false;
};

} // namespace

TEST_CASE("criterion 11: imperfect-monitoring barrier") {
    Cisg g = random_ergodic_cisg(2, {2, 2}, 1.0, 6000);
    const RmaxConfig cfg = cfg_with(0.3, 2, 2);
    bool ok = true;
    bool leaked = false;

    auto run_probed = [&](auto& controllers, const Cisg& game, long steps) {
        std::vector<std::unique_ptr<MonitoringProbe>> probes;
        for (auto& c : controllers) probes.push_back(std::make_unique<MonitoringProbe>(c.get()));
        std::vector<AgentController*> ptrs;
        for (auto& p : probes) ptrs.push_back(p.get());
        auto log = run_simulation(game, ptrs, Monitoring::imperfect, 77, steps);
        if (log.steps() != steps) ok = false;
        for (auto& p : probes)
            if (p->leaked()) leaked = true;
        // serialized observations carry no trace of other agents' actions:
        // structurally impossible, asserted via the optional being empty
    };

    {
        auto cs = make_case1_controllers(g, g.canonical_indexing(), cfg);
        run_probed(cs, g, 500);
    }
    {
        auto cs = make_case2_controllers(g, {1, 0}, cfg);
        run_probed(cs, g, 500);
    }
    {
        auto sched = compute_schedule(0.3, 0.5, 0.5, 1.0, 2, 2, 1, 10);
        auto cs = make_case4_controllers(g, sched, cfg);
        run_probed(cs, g, sched.m * sched.t_prime + 200);
    }
    {
        auto sched = compute_schedule(0.3, 0.5, 0.5, 1.0, 2, 2, 2, 10);
        auto cs = make_case5_controllers(g, sched, cfg);
        run_probed(cs, g, sched.trial_count() * sched.t_prime + 200);
    }
    {
        auto cs = make_case6_controllers(g, 0.3, 0.5, 0.5, 2, 2);
        run_probed(cs, g, 2000);
    }
    {
        Cisg rg = oracles::load_fixture("coord3x3");
        auto cs = make_repeated_controllers(rg);
        run_probed(cs, rg, 40);
    }
    // type-level: the optional is absent under imperfect monitoring and
    // dereferencing it faults
    Observation obs;
    if (obs.others_actions.has_value()) ok = false;
    bool threw = false;
    try {
        (void)obs.others();
    } catch (const CisgError&) {
        threw = true;
    }
    if (!threw) ok = false;

    report(11, "cases 1,2,4,5,6 and repeated complete imperfectly; no others_actions",
           ok && !leaked);
    CHECK(ok);
    CHECK_FALSE(leaked);
}
