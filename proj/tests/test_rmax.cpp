#include <catch2/catch_amalgamated.hpp>

#include "cisg/rmax.hpp"
#include "oracles.hpp"

using namespace cisg;

namespace {

RmaxConfig small_config(int t_mix = 3, std::optional<std::int64_t> k1 = std::nullopt) {
    RmaxConfig cfg;
    cfg.epsilon = 0.1;
    cfg.delta = 0.1;
    cfg.t_mix = t_mix;
    cfg.r_max = 1.0;
    cfg.k1_override = k1;
    return cfg;
}

} // namespace

TEST_CASE("k1_threshold spot value (ceiling-then-cube reading)") {
    // first arm ceil(4*2*3*1/0.1)^3 = 240^3 = 13,824,000; second arm
    // ceil(-6 ln^3(0.1/48)) = 1412; max + 1
    CHECK(k1_threshold(2, 2, 3, 1.0, 0.1, 0.1) == 13'824'001);
}

TEST_CASE("k1_threshold: halving epsilon multiplies the first arm by 8") {
    CHECK(k1_threshold(2, 2, 3, 1.0, 0.05, 0.1) == 110'592'001);
}

TEST_CASE("k1_override wins over the formula") {
    RmaxLearner learner(2, 2, small_config(3, 10));
    CHECK(learner.k1() == 10);
    RmaxLearner formula(2, 2, small_config(3));
    CHECK(formula.k1() == 13'824'001);
}

TEST_CASE("init_model: optimistic placeholder structure") {
    RmaxModel m = init_model(2, 3, small_config());
    CHECK(m.fictitious_state() == 2);
    REQUIRE(m.reward_est.size() == 3); // N+1 states including s0
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 3; ++a) {
            CHECK(m.reward_est[s][a] == 1.0);
            CHECK(m.trans_est[s][a] == std::vector<double>{0.0, 0.0, 1.0});
        }
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 3; ++a) {
            CHECK_FALSE(m.known[s][a]);
            CHECK(m.visit_totals[s][a] == 0);
            CHECK_FALSE(m.reward_seen[s][a].has_value());
        }
    CHECK(m.known_count == 0);
}

TEST_CASE("planning on the fresh model yields T * r_max") {
    RmaxModel m = init_model(2, 3, small_config());
    for (int horizon : {1, 3, 7}) {
        auto res = finite_horizon_plan(m.as_mdp(), horizon);
        for (int s = 0; s < 3; ++s)
            CHECK_THAT(res.value[horizon][s],
                       Catch::Matchers::WithinAbs(horizon * 1.0, 1e-12));
    }
}

TEST_CASE("fresh learner picks action 0 by tie-break") {
    RmaxLearner learner(2, 4, small_config());
    CHECK(learner.act(0) == 0);
    CHECK(learner.last_act_replanned());
}

TEST_CASE("replan happens exactly at step T+1 absent known flips") {
    const int t_mix = 3;
    RmaxLearner learner(2, 2, small_config(t_mix, 1000));
    for (int step = 1; step <= 2 * t_mix + 1; ++step) {
        learner.act(0);
        const bool expect_replan = (step - 1) % t_mix == 0;
        CHECK(learner.last_act_replanned() == expect_replan);
        learner.observe(0, 0, 0.5, 1);
    }
}

TEST_CASE("first observation records the reward, pair stays unknown") {
    RmaxLearner learner(2, 2, small_config(3, 3));
    CHECK_FALSE(learner.observe(0, 1, 0.7, 1));
    CHECK(learner.model().reward_seen[0][1] == 0.7);
    CHECK_FALSE(learner.model().known[0][1]);
    // the model used for planning still carries the optimistic placeholder
    CHECK(learner.model().reward_est[0][1] == 1.0);
}

TEST_CASE("known flip installs empirical frequencies") {
    RmaxLearner learner(3, 2, small_config(3, 3));
    CHECK_FALSE(learner.observe(0, 0, 0.7, 1));
    CHECK_FALSE(learner.observe(0, 0, 0.7, 1));
    CHECK(learner.observe(0, 0, 0.7, 2)); // third visit: flip
    const auto& m = learner.model();
    CHECK(m.known[0][0]);
    CHECK(m.known_count == 1);
    CHECK(m.reward_est[0][0] == 0.7);
    const std::vector<double> expect{0.0, 2.0 / 3.0, 1.0 / 3.0, 0.0};
    CHECK(m.trans_est[0][0] == expect);
}

TEST_CASE("observations after the flip are ignored") {
    RmaxLearner learner(3, 2, small_config(3, 2));
    learner.observe(0, 0, 0.7, 1);
    learner.observe(0, 0, 0.7, 1);
    RmaxModel frozen = learner.model();
    CHECK_FALSE(learner.observe(0, 0, 0.7, 2));
    CHECK(learner.model() == frozen);
}

TEST_CASE("known pair steers the plan away once its reward is low") {
    // 2-state MDP; (s0, a0) just became known with reward 0 while (s0, a1)
    // is still unknown and thus worth r_max via the fictitious state
    RmaxLearner learner(2, 2, small_config(2, 1));
    learner.observe(0, 0, 0.0, 1); // flips immediately with K1 = 1
    CHECK(learner.act(0) == 1);
}

TEST_CASE("reward outside [0, r_max] faults") {
    RmaxLearner learner(2, 2, small_config());
    CHECK_THROWS_AS(learner.observe(0, 0, 1.5, 1), CisgError);
}

TEST_CASE("run_rmax: constant single-action MDP") {
    InducedMdp m;
    m.num_states = 1;
    m.num_actions = 1;
    m.reward = {{0.5}};
    m.transition = {{{1.0}}};
    auto log = run_rmax(m, small_config(1, 2), 7, 10);
    REQUIRE(log.steps() == 10);
    for (const auto& rec : log.records) CHECK(rec.payoff == 0.5);
    // known after 2 steps
    CHECK(log.records[1].event.find("known=1") != std::string::npos);
    CHECK_THAT(log.running_average(), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("run_rmax is deterministic given (seed, config)") {
    InducedMdp m = oracles::random_mdp(3, 2, 5, 0.05);
    auto a = run_rmax(m, small_config(4, 5), 99, 500);
    auto b = run_rmax(m, small_config(4, 5), 99, 500);
    CHECK(a.records == b.records);
    CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("known count is monotone and each pair flips once") {
    InducedMdp m = oracles::random_mdp(3, 2, 6, 0.05);
    auto log = run_rmax(m, small_config(4, 8), 3, 2000);
    int known = 0;
    for (const auto& rec : log.records) {
        const auto pos = rec.event.find("known=");
        if (pos != std::string::npos) {
            const int now = std::stoi(rec.event.substr(pos + 6));
            CHECK(now == known + 1);
            known = now;
        }
    }
    CHECK(known == 6); // every pair of the 3x2 MDP became known
}

TEST_CASE("replans occur iff a flip preceded or T steps elapsed") {
    InducedMdp m = oracles::random_mdp(3, 2, 6, 0.05);
    const int t_mix = 5;
    auto log = run_rmax(m, small_config(t_mix, 8), 3, 1000);
    int steps_since_replan = 0;
    bool flip_pending = true; // initial plan counts as pending
    for (const auto& rec : log.records) {
        const bool replanned = rec.event.find("replan") != std::string::npos;
        CHECK(replanned == (flip_pending || steps_since_replan >= t_mix));
        if (replanned) steps_since_replan = 0;
        ++steps_since_replan;
        flip_pending = rec.event.find("known=") != std::string::npos;
    }
}

TEST_CASE("run_rmax converges on a small ergodic MDP with practical K1") {
    Cisg g = random_ergodic_cisg(4, {2, 2}, 1.0, 42);
    InducedMdp m = induce_mdp(g);
    auto report = optimal_value_oracle(m);
    auto t_mix = epsilon_mixing_time(m, report.argmax_policy, 0.1, 1000);
    REQUIRE(t_mix.has_value());
    auto log = run_rmax(m, small_config(std::max(*t_mix, 1), 10), 42, 50'000);
    CHECK(log.running_average() >= report.optimal_value - 0.15);
}
