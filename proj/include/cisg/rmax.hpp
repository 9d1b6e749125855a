#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cisg/game.hpp"
#include "cisg/planning.hpp"
#include "cisg/rng.hpp"
#include "cisg/runlog.hpp"

namespace cisg {

struct RmaxConfig {
    double epsilon = 0.1;
    double delta = 0.1;
    int t_mix = 1; // assumed eps-return mixing time; also the replan horizon
    double r_max = 1.0;
    std::optional<std::int64_t> k1_override;

    void validate() const {
        if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
        if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0,1)");
        if (t_mix < 1) throw std::invalid_argument("t_mix must be >= 1");
        if (r_max < 0.0) throw std::invalid_argument("r_max must be nonnegative");
        if (k1_override && *k1_override < 1)
            throw std::invalid_argument("k1_override must be positive");
    }
};

// Visit-count threshold at which a state-action pair's empirical model
// replaces the optimistic placeholder:
//   K1 = max(ceil(4 N T Rmax / eps)^3, ceil(-6 ln^3(delta / (6 N k^2)))) + 1
// The first arm is read as ceiling-then-cube.
inline std::int64_t k1_threshold(int num_states, int num_actions, int t_mix,
                                 double r_max, double epsilon, double delta) {
    if (num_states < 1 || num_actions < 1 || t_mix < 1)
        throw std::invalid_argument("k1_threshold: sizes must be positive");
    if (epsilon <= 0.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("k1_threshold: bad epsilon/delta");
    const double c =
        std::ceil(4.0 * num_states * t_mix * r_max / epsilon);
    __int128 arm1 = static_cast<__int128>(c);
    arm1 = arm1 * arm1 * arm1;
    const double lg = std::log(delta / (6.0 * num_states *
                                        static_cast<double>(num_actions) * num_actions));
    const double arm2d = std::ceil(-6.0 * lg * lg * lg);
    __int128 arm2 = static_cast<__int128>(arm2d);
    __int128 k1 = (arm1 > arm2 ? arm1 : arm2) + 1;
    const __int128 cap = std::numeric_limits<std::int64_t>::max();
    if (k1 > cap) throw std::overflow_error("k1_threshold overflows int64");
    return static_cast<std::int64_t>(k1);
}

// The learner's optimistic internal model: N real states plus a fictitious
// absorbing state s0 = N. Unknown pairs carry reward r_max and a point-mass
// transition to s0; once known, a pair is frozen at its empirical
// frequencies.
struct RmaxModel {
    int num_real_states = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> reward_est;   // [N+1][k]
    std::vector<std::vector<std::vector<double>>> trans_est; // [N+1][k][N+1]
    std::vector<std::vector<bool>> known;          // [N][k]
    std::vector<std::vector<std::vector<std::int64_t>>> visit_counts; // [N][k][N]
    std::vector<std::vector<std::int64_t>> visit_totals;              // [N][k]
    std::vector<std::vector<std::optional<double>>> reward_seen;      // [N][k]
    int known_count = 0;

    int fictitious_state() const { return num_real_states; }

    InducedMdp as_mdp() const {
        InducedMdp m;
        m.num_states = num_real_states + 1;
        m.num_actions = num_actions;
        m.reward = reward_est;
        m.transition = trans_est;
        return m;
    }

    bool operator==(const RmaxModel&) const = default;
};

inline RmaxModel init_model(int num_states, int num_actions, const RmaxConfig& cfg) {
    cfg.validate();
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("init_model: sizes must be positive");
    RmaxModel m;
    m.num_real_states = num_states;
    m.num_actions = num_actions;
    const int total = num_states + 1; // including the fictitious state
    m.reward_est.assign(total, std::vector<double>(num_actions, cfg.r_max));
    m.trans_est.assign(total, {});
    for (int s = 0; s < total; ++s) {
        m.trans_est[s].assign(num_actions, std::vector<double>(total, 0.0));
        for (int a = 0; a < num_actions; ++a)
            m.trans_est[s][a][num_states] = 1.0; // point-mass on s0
    }
    m.known.assign(num_states, std::vector<bool>(num_actions, false));
    m.visit_counts.assign(
        num_states,
        std::vector<std::vector<std::int64_t>>(num_actions,
                                               std::vector<std::int64_t>(num_states, 0)));
    m.visit_totals.assign(num_states, std::vector<std::int64_t>(num_actions, 0));
    m.reward_seen.assign(num_states,
                         std::vector<std::optional<double>>(num_actions, std::nullopt));
    return m;
}

// Deterministic R-MAX learner over an MDP interface. All randomness lives in
// the environment; given the same observation sequence, two learners evolve
// identically. That determinism is what lets a team of agents emulate one
// centralized learner.
class RmaxLearner {
public:
    RmaxLearner(int num_states, int num_actions, RmaxConfig cfg)
        : cfg_(std::move(cfg)),
          model_(init_model(num_states, num_actions, cfg_)),
          k1_(cfg_.k1_override
                  ? *cfg_.k1_override
                  : k1_threshold(num_states, num_actions, cfg_.t_mix, cfg_.r_max,
                                 cfg_.epsilon, cfg_.delta)),
          replan_pending_(true),
          plan_cursor_(0) {}

    // Returns the plan's next action for the current state, recomputing the
    // T-step plan first when a known flag flipped or T steps elapsed.
    int act(int state) {
        if (state < 0 || state >= model_.num_real_states)
            throw std::invalid_argument("act: state out of range");
        last_act_replanned_ = false;
        if (replan_pending_ || plan_cursor_ >= cfg_.t_mix) {
            plan_ = finite_horizon_plan(model_.as_mdp(), cfg_.t_mix).policy;
            plan_cursor_ = 0;
            replan_pending_ = false;
            last_act_replanned_ = true;
        }
        return plan_.action_at[plan_cursor_++][state];
    }

    // Records the transition; returns true when the pair just became known.
    bool observe(int state, int action, double reward, int next_state) {
        if (state < 0 || state >= model_.num_real_states ||
            next_state < 0 || next_state >= model_.num_real_states ||
            action < 0 || action >= model_.num_actions)
            throw std::invalid_argument("observe: indices out of range");
        if (reward < 0.0 || reward > cfg_.r_max)
            throw CisgError("observed reward outside [0, r_max]");
        if (model_.known[state][action]) return false; // frozen
        if (!model_.reward_seen[state][action])
            model_.reward_seen[state][action] = reward;
        ++model_.visit_counts[state][action][next_state];
        if (++model_.visit_totals[state][action] < k1_) return false;
        // threshold reached: install empirical frequencies, freeze the pair
        model_.known[state][action] = true;
        ++model_.known_count;
        auto& row = model_.trans_est[state][action];
        std::fill(row.begin(), row.end(), 0.0);
        for (int t = 0; t < model_.num_real_states; ++t)
            row[t] = static_cast<double>(model_.visit_counts[state][action][t]) /
                     static_cast<double>(k1_);
        model_.reward_est[state][action] = *model_.reward_seen[state][action];
        replan_pending_ = true;
        return true;
    }

    const RmaxModel& model() const { return model_; }
    const RmaxConfig& config() const { return cfg_; }
    std::int64_t k1() const { return k1_; }
    bool last_act_replanned() const { return last_act_replanned_; }
    const FiniteHorizonPolicy& current_plan() const { return plan_; }

private:
    RmaxConfig cfg_;
    RmaxModel model_;
    std::int64_t k1_;
    FiniteHorizonPolicy plan_;
    bool replan_pending_;
    int plan_cursor_;
    bool last_act_replanned_ = false;
};

namespace detail {

inline std::string rmax_step_event(bool replanned, bool flipped, int known_count) {
    std::string ev;
    if (replanned) ev = "replan";
    if (flipped) {
        if (!ev.empty()) ev += ";";
        ev += "known=" + std::to_string(known_count);
    }
    return ev;
}

} // namespace detail

// Single-agent R-MAX run against a sampled true MDP. The environment stream
// is derived as stream 0 of the master seed, matching the harness convention,
// so centralized and team runs draw identical transition samples.
inline RunLog run_rmax(const InducedMdp& env, const RmaxConfig& cfg,
                       std::uint64_t master_seed, long num_steps,
                       int start_state = 0) {
    RmaxLearner learner(env.num_states, env.num_actions, cfg);
    RngStream env_rng = derive_stream(master_seed, 0);
    RunLog log;
    log.master_seed = master_seed;
    int state = start_state;
    for (long step = 0; step < num_steps; ++step) {
        const int action = learner.act(state);
        const bool replanned = learner.last_act_replanned();
        const double reward = env.reward[state][action];
        const int next = env_rng.sample(env.transition[state][action]);
        const bool flipped = learner.observe(state, action, reward, next);
        StepRecord rec;
        rec.step = step;
        rec.state = state;
        rec.actions = {action};
        rec.payoff = reward;
        rec.phase = "rmax";
        rec.event = detail::rmax_step_event(replanned, flipped, learner.model().known_count);
        log.append(std::move(rec));
        state = next;
    }
    return log;
}

} // namespace cisg
