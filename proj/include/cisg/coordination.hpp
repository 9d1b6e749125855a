#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cisg/game.hpp"
#include "cisg/harness.hpp"
#include "cisg/indexing.hpp"
#include "cisg/planning.hpp"
#include "cisg/rmax.hpp"
#include "cisg/rng.hpp"

namespace cisg {

// ---------------------------------------------------------------------------
// Schedules

// Derived quantities shared by the order-exploration protocols. All agents
// compute the same schedule from the same public parameters.
struct ProtocolSchedule {
    int m = 0;        // order-exploration trials per candidate size tuple
    int t_prime = 0;  // trial length
    long q = 0;       // exploitation length
    int b = 1;        // shared bound on per-agent action counts
    std::vector<std::vector<int>> sizes_order; // fixed enumeration of count tuples
    std::vector<int> mixing_schedule;          // assumed mixing times (doubling)
    double gamma = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double rmax_bound_logged = 0.0; // informational; see compute_schedule

    long size_count() const { return static_cast<long>(sizes_order.size()); }
    long trial_count() const { return m * std::max<long>(1, size_count()); }
};

namespace detail {

inline long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline std::vector<std::vector<int>> enumerate_size_tuples(int n, int b) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 1);
    while (true) {
        out.push_back(cur);
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++cur[i] <= b) break;
            cur[i] = 1;
        }
        if (i < 0) break;
    }
    return out;
}

} // namespace detail

// Smallest integers satisfying the schedule inequalities:
//   m  : strictly above log(delta/2) / log(1 - p_same*(1 - delta/2)),
//        p_same = 1/n!
//   T' : strictly above m * r_max / epsilon (and at least t_mix and any
//        caller-supplied floor, e.g. a step bound for the embedded learner)
//   Q  : strictly above (1/gamma) * 2 * m * |sizes| * T'
// rmax_step_bound is recorded in the schedule and folded into T'; callers
// using practical (overridden) visit thresholds pass their matching bound.
inline ProtocolSchedule compute_schedule(double epsilon, double delta, double gamma,
                                         double r_max, int num_agents, int t_mix,
                                         int b = 1, long t_prime_floor = 0,
                                         double rmax_step_bound = 0.0) {
    if (epsilon <= 0.0 || gamma <= 0.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("compute_schedule: bad accuracy parameters");
    if (num_agents < 2 || num_agents > 12)
        throw std::invalid_argument("compute_schedule: num_agents out of range");
    if (t_mix < 1 || b < 1) throw std::invalid_argument("compute_schedule: bad t_mix/b");
    ProtocolSchedule s;
    s.epsilon = epsilon;
    s.delta = delta;
    s.gamma = gamma;
    s.b = b;
    const double p_same = 1.0 / static_cast<double>(detail::factorial(num_agents));
    const double ratio =
        std::log(delta / 2.0) / std::log(1.0 - p_same * (1.0 - delta / 2.0));
    s.m = static_cast<int>(std::floor(ratio)) + 1;
    long tp = static_cast<long>(std::floor(s.m * r_max / epsilon)) + 1;
    tp = std::max<long>({tp, t_mix, t_prime_floor,
                         static_cast<long>(std::min(rmax_step_bound, 2e9))});
    if (tp > std::numeric_limits<int>::max())
        throw std::overflow_error("compute_schedule: t_prime exceeds int range");
    s.t_prime = static_cast<int>(tp);
    s.rmax_bound_logged = rmax_step_bound;
    s.sizes_order = detail::enumerate_size_tuples(num_agents, b);
    const double qx = 2.0 * s.m * static_cast<double>(s.sizes_order.size()) *
                      s.t_prime / gamma;
    s.q = static_cast<long>(std::floor(qx)) + 1;
    for (int t = 1, i = 0; i < 24; ++i, t *= 2) s.mixing_schedule.push_back(t);
    return s;
}

// ---------------------------------------------------------------------------
// Cases 1-2: distributed emulation of a single centralized learner

namespace detail {

inline int clamp_own(int component, int true_count) {
    return component < true_count ? component : true_count - 1;
}

} // namespace detail

// Runs a private R-MAX instance over the joint-action space under a fixed
// bijection and plays its own component of the chosen joint action. With a
// shared bijection and common payoffs, every agent's model stays identical
// to a centralized learner's, never reading the other agents' actions.
// Assumed action counts may exceed the agent's real set (Case 5); decoded
// own-components are then clamped into the real set.
class RmaxEmulationController : public AgentController {
public:
    RmaxEmulationController(int agent_id, int true_action_count, int num_states,
                            JointActionIndexing indexing, RmaxConfig cfg)
        : agent_id_(agent_id),
          true_count_(true_action_count),
          indexing_(std::move(indexing)),
          learner_(num_states, indexing_.num_joint(), std::move(cfg)) {}

    int act(int state) override {
        last_joint_ = learner_.act(state);
        replanned_ = learner_.last_act_replanned();
        const int own = indexing_.decode(last_joint_).components[agent_id_];
        return detail::clamp_own(own, true_count_);
    }

    void observe(const Observation& obs) override {
        flipped_ = learner_.observe(obs.state, last_joint_, obs.payoff, obs.next_state);
    }

    std::string phase() const override { return "rmax"; }

    std::string poll_event() override {
        return detail::rmax_step_event(replanned_, flipped_,
                                       learner_.model().known_count);
    }

    const RmaxModel& model() const { return learner_.model(); }
    const JointActionIndexing& indexing() const { return indexing_; }

private:
    int agent_id_;
    int true_count_;
    JointActionIndexing indexing_;
    RmaxLearner learner_;
    int last_joint_ = 0;
    bool replanned_ = false;
    bool flipped_ = false;
};

// Case 1: all agents share an ordering over the joint actions.
inline std::vector<std::unique_ptr<RmaxEmulationController>> make_case1_controllers(
    const Cisg& game, const JointActionIndexing& shared_indexing,
    const RmaxConfig& cfg) {
    std::vector<std::unique_ptr<RmaxEmulationController>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<RmaxEmulationController>(
            i, game.action_counts()[i], game.num_states(), shared_indexing, cfg));
    return out;
}

// Case 2: a common agent ordering plus known action-set sizes induce the
// lexicographic bijection; beyond that it is Case 1.
inline std::vector<std::unique_ptr<RmaxEmulationController>> make_case2_controllers(
    const Cisg& game, const std::vector<int>& agent_order, const RmaxConfig& cfg) {
    JointActionIndexing ix;
    ix.agent_order = agent_order;
    ix.action_counts = game.action_counts();
    return make_case1_controllers(game, ix, cfg);
}

// Centralized reference run: single-agent R-MAX on the induced MDP, rendered
// in team shape (decoded per-agent actions, replicated phase/event columns)
// so its log is directly comparable with a distributed Case-1 run.
inline RunLog run_case1_centralized(const Cisg& game, const JointActionIndexing& ix,
                                    const RmaxConfig& cfg, std::uint64_t master_seed,
                                    long num_steps, int start_state = 0) {
    const InducedMdp mdp = induce_mdp(game, ix);
    RmaxLearner learner(mdp.num_states, mdp.num_actions, cfg);
    RngStream env_rng = derive_stream(master_seed, 0);
    const int n = game.num_agents();
    RunLog log;
    log.master_seed = master_seed;
    int state = start_state;
    for (long step = 0; step < num_steps; ++step) {
        const int joint = learner.act(state);
        const bool replanned = learner.last_act_replanned();
        const double payoff = mdp.reward[state][joint];
        const int next = env_rng.sample(mdp.transition[state][joint]);
        const bool flipped = learner.observe(state, joint, payoff, next);
        const std::string ev =
            detail::rmax_step_event(replanned, flipped, learner.model().known_count);
        StepRecord rec;
        rec.step = step;
        rec.state = state;
        rec.actions = ix.decode(joint).components;
        rec.payoff = payoff;
        for (int i = 0; i < n; ++i) {
            if (i) rec.phase += "/";
            rec.phase += "rmax";
        }
        if (!ev.empty()) {
            for (int i = 0; i < n; ++i) {
                if (i) rec.event += "/";
                rec.event += ev;
            }
        }
        log.append(std::move(rec));
        state = next;
    }
    return log;
}

// ---------------------------------------------------------------------------
// Case 3: perfect monitoring handshake

// Phase A: every agent cycles its actions; watching the others cycle exposes
// their action counts (an agent's count is the step at which it first
// repeats its initial action). Phase B: every agent draws a random action
// index; lower index goes earlier in the agent order, ties force a full
// redraw. Phase C: Case-2 emulation under the agreed (order, counts).
class Case3Controller : public AgentController {
public:
    Case3Controller(int agent_id, int num_agents, int own_action_count,
                    int num_states, RmaxConfig cfg)
        : agent_id_(agent_id),
          num_agents_(num_agents),
          own_count_(own_action_count),
          num_states_(num_states),
          cfg_(std::move(cfg)),
          first_action_(num_agents, -1),
          revealed_counts_(num_agents, 0) {}

    void seed(RngStream rng) override { rng_ = rng; }

    int act(int state) override {
        switch (phase_) {
            case Phase::cycle:
                return step_a_ % own_count_;
            case Phase::draw:
                draw_ = rng_->next_int(own_count_);
                return draw_;
            case Phase::emulate:
                return emulation_->act(state);
        }
        throw std::logic_error("unreachable");
    }

    void observe(const Observation& obs) override {
        switch (phase_) {
            case Phase::cycle: {
                const auto& all = obs.others(); // perfect monitoring required
                bool all_revealed = true;
                for (int j = 0; j < num_agents_; ++j) {
                    if (step_a_ == 0) first_action_[j] = all[j];
                    else if (revealed_counts_[j] == 0 && all[j] == first_action_[j])
                        revealed_counts_[j] = step_a_;
                    if (revealed_counts_[j] == 0) all_revealed = false;
                }
                ++step_a_;
                if (all_revealed) phase_ = Phase::draw;
                break;
            }
            case Phase::draw: {
                const auto& all = obs.others();
                if (draw_history_.empty()) draw_history_.resize(num_agents_);
                for (int j = 0; j < num_agents_; ++j) draw_history_[j].push_back(all[j]);
                // order agents by their accumulated draw sequences; a tie
                // forces another round of draws, except between agents whose
                // single-action sets can never produce distinct draws (their
                // relative order is immaterial, the observation slot decides)
                std::vector<int> order(num_agents_);
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int x, int y) {
                    if (draw_history_[x] != draw_history_[y])
                        return draw_history_[x] < draw_history_[y];
                    return x < y;
                });
                for (int i = 0; i + 1 < num_agents_; ++i) {
                    const int a = order[i], b = order[i + 1];
                    if (draw_history_[a] == draw_history_[b] &&
                        (revealed_counts_[a] > 1 || revealed_counts_[b] > 1))
                        return; // unresolved tie: everyone redraws
                }
                agreed_order_ = std::move(order);
                JointActionIndexing ix;
                ix.agent_order = agreed_order_;
                ix.action_counts = revealed_counts_;
                emulation_ = std::make_unique<RmaxEmulationController>(
                    agent_id_, own_count_, num_states_, std::move(ix), cfg_);
                event_ = "agree";
                phase_ = Phase::emulate;
                break;
            }
            case Phase::emulate:
                emulation_->observe(obs);
                break;
        }
    }

    std::string phase() const override {
        switch (phase_) {
            case Phase::cycle: return "handshake-a";
            case Phase::draw: return "handshake-b";
            case Phase::emulate: return "rmax";
        }
        return {};
    }

    std::string poll_event() override {
        if (!event_.empty()) {
            std::string ev;
            std::swap(ev, event_);
            return ev;
        }
        return emulation_ ? emulation_->poll_event() : std::string{};
    }

    bool handshake_done() const { return phase_ == Phase::emulate; }
    long phase_a_length() const { return step_a_; }
    const std::vector<int>& agreed_order() const { return agreed_order_; }
    const std::vector<int>& agreed_counts() const { return revealed_counts_; }
    const RmaxEmulationController* emulation() const { return emulation_.get(); }

private:
    enum class Phase { cycle, draw, emulate };

    int agent_id_;
    int num_agents_;
    int own_count_;
    int num_states_;
    RmaxConfig cfg_;
    Phase phase_ = Phase::cycle;
    long step_a_ = 0;
    std::vector<int> first_action_;
    std::vector<int> revealed_counts_;
    int draw_ = -1;
    std::vector<std::vector<int>> draw_history_; // per agent, one entry per round
    std::vector<int> agreed_order_;
    std::unique_ptr<RmaxEmulationController> emulation_;
    std::optional<RngStream> rng_;
    std::string event_;
};

inline std::vector<std::unique_ptr<Case3Controller>> make_case3_controllers(
    const Cisg& game, const RmaxConfig& cfg) {
    std::vector<std::unique_ptr<Case3Controller>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<Case3Controller>(
            i, game.num_agents(), game.action_counts()[i], game.num_states(), cfg));
    return out;
}

// ---------------------------------------------------------------------------
// Cases 4-5: order (and size) exploration under imperfect monitoring

// One exploration trial: the ordering this agent gambled on, the assumed
// action counts, the realized average reward, and the greedy plan learned
// under that hypothesis.
struct TrialRecord {
    int index = 0;
    std::vector<int> agent_order;
    std::vector<int> assumed_counts;
    double average = 0.0;
    JointActionIndexing indexing;
    FiniteHorizonPolicy policy;
};

// Case 4 (true counts known) and Case 5 (only a size bound known) share this
// machinery; they differ only in the list of assumed count tuples. Explore:
// for each tuple, m trials of length T', each under a privately drawn random
// agent ordering, scored by realized average reward. Exploit: adopt the
// best-scoring trial's frozen plan; after a t_mix warm-up, fall back to the
// next-best trial whenever the segment average drops below (trial average -
// 2*epsilon). Payoffs are common, so all agents score, sort, and switch in
// lockstep without communicating.
class OrderExplorationController : public AgentController {
public:
    OrderExplorationController(int agent_id, int num_agents, int true_action_count,
                               int num_states, ProtocolSchedule schedule,
                               RmaxConfig rmax_cfg,
                               std::vector<std::vector<int>> trial_counts)
        : agent_id_(agent_id),
          num_agents_(num_agents),
          true_count_(true_action_count),
          num_states_(num_states),
          sched_(std::move(schedule)),
          rmax_cfg_(std::move(rmax_cfg)),
          trial_counts_(std::move(trial_counts)) {
        if (trial_counts_.empty())
            throw std::invalid_argument("no trials configured");
    }

    void seed(RngStream rng) override { rng_ = rng; }

    int act(int state) override {
        if (exploring()) {
            if (trial_step_ == 0) start_trial();
            last_joint_ = learner_->act(state);
            const int own = cur_indexing_.decode(last_joint_).components[agent_id_];
            return detail::clamp_own(own, true_count_);
        }
        const TrialRecord& rec = trials_[order_[current_]];
        const int joint =
            rec.policy.action_at[seg_step_ % rec.policy.horizon][state];
        const int own = rec.indexing.decode(joint).components[agent_id_];
        return detail::clamp_own(own, true_count_);
    }

    void observe(const Observation& obs) override {
        if (exploring()) {
            learner_->observe(obs.state, last_joint_, obs.payoff, obs.next_state);
            trial_total_ += obs.payoff;
            if (++trial_step_ == sched_.t_prime) finish_trial();
            return;
        }
        seg_total_ += obs.payoff;
        ++seg_step_;
        const TrialRecord& rec = trials_[order_[current_]];
        if (seg_step_ > rmax_cfg_.t_mix &&
            seg_total_ / static_cast<double>(seg_step_) <
                rec.average - 2.0 * sched_.epsilon &&
            current_ + 1 < static_cast<long>(order_.size())) {
            ++current_;
            ++switches_;
            seg_step_ = 0;
            seg_total_ = 0.0;
            event_ = "switch";
        }
    }

    std::string phase() const override { return exploring() ? "explore" : "exploit"; }

    std::string poll_event() override {
        std::string ev;
        std::swap(ev, event_);
        return ev;
    }

    int switch_count() const override { return switches_; }
    const std::vector<TrialRecord>& trials() const { return trials_; }
    bool exploiting() const { return !exploring(); }
    // trial currently exploited (valid once exploiting)
    const TrialRecord& chosen() const { return trials_[order_[current_]]; }

private:
    bool exploring() const {
        return trials_.size() < trial_counts_.size();
    }

    void start_trial() {
        if (!rng_) throw std::logic_error("controller not seeded");
        const auto& counts = trial_counts_[trials_.size()];
        cur_indexing_.action_counts = counts;
        cur_indexing_.agent_order = random_permutation();
        learner_ = std::make_unique<RmaxLearner>(num_states_,
                                                 cur_indexing_.num_joint(), rmax_cfg_);
        trial_total_ = 0.0;
        event_ = "trial=" + std::to_string(trials_.size());
    }

    void finish_trial() {
        TrialRecord rec;
        rec.index = static_cast<int>(trials_.size());
        rec.agent_order = cur_indexing_.agent_order;
        rec.assumed_counts = cur_indexing_.action_counts;
        rec.average = trial_total_ / static_cast<double>(sched_.t_prime);
        rec.indexing = cur_indexing_;
        rec.policy =
            finite_horizon_plan(learner_->model().as_mdp(), rmax_cfg_.t_mix).policy;
        trials_.push_back(std::move(rec));
        trial_step_ = 0;
        learner_.reset();
        if (!exploring()) {
            // sort by average descending, ties by lower trial index
            order_.resize(trials_.size());
            std::iota(order_.begin(), order_.end(), 0);
            std::stable_sort(order_.begin(), order_.end(), [&](long a, long b) {
                return trials_[a].average > trials_[b].average;
            });
            current_ = 0;
            seg_step_ = 0;
            seg_total_ = 0.0;
            event_ = "exploit";
        }
    }

    std::vector<int> random_permutation() {
        std::vector<int> p(num_agents_);
        std::iota(p.begin(), p.end(), 0);
        for (int i = num_agents_ - 1; i > 0; --i)
            std::swap(p[i], p[rng_->next_int(i + 1)]);
        return p;
    }

    int agent_id_;
    int num_agents_;
    int true_count_;
    int num_states_;
    ProtocolSchedule sched_;
    RmaxConfig rmax_cfg_;
    std::vector<std::vector<int>> trial_counts_; // assumed counts per trial

    std::optional<RngStream> rng_;
    std::unique_ptr<RmaxLearner> learner_;
    JointActionIndexing cur_indexing_;
    int last_joint_ = 0;
    long trial_step_ = 0;
    double trial_total_ = 0.0;
    std::vector<TrialRecord> trials_;

    std::vector<long> order_; // trial indices sorted best-first
    long current_ = 0;
    long seg_step_ = 0;
    double seg_total_ = 0.0;
    int switches_ = 0;
    std::string event_;
};

// Case 4: action counts are public, orderings are not.
inline std::vector<std::unique_ptr<OrderExplorationController>> make_case4_controllers(
    const Cisg& game, const ProtocolSchedule& schedule, const RmaxConfig& cfg) {
    std::vector<std::vector<int>> trial_counts(schedule.m, game.action_counts());
    std::vector<std::unique_ptr<OrderExplorationController>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<OrderExplorationController>(
            i, game.num_agents(), game.action_counts()[i], game.num_states(),
            schedule, cfg, trial_counts));
    return out;
}

// Case 5: only the shared bound b is public; the fixed sizes_order is part
// of the algorithm, so every agent sweeps the same tuples in the same order.
inline std::vector<std::unique_ptr<OrderExplorationController>> make_case5_controllers(
    const Cisg& game, const ProtocolSchedule& schedule, const RmaxConfig& cfg) {
    std::vector<std::vector<int>> trial_counts;
    for (const auto& sizes : schedule.sizes_order)
        for (int t = 0; t < schedule.m; ++t) trial_counts.push_back(sizes);
    std::vector<std::unique_ptr<OrderExplorationController>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<OrderExplorationController>(
            i, game.num_agents(), game.action_counts()[i], game.num_states(),
            schedule, cfg, trial_counts));
    return out;
}

// ---------------------------------------------------------------------------
// Case 6: unknown mixing time

// Outer loop over doubling assumed mixing times. Each phase runs Case 5
// configured for a (1 - gamma/2) factor with a concrete step budget
// (exploration plus Q); the loop itself never terminates, the harness caps
// total steps.
class Case6Controller : public AgentController {
public:
    Case6Controller(int agent_id, int num_agents, int true_action_count,
                    int num_states, double epsilon, double delta, double gamma,
                    double r_max, int b, std::optional<std::int64_t> k1_override)
        : agent_id_(agent_id),
          num_agents_(num_agents),
          true_count_(true_action_count),
          num_states_(num_states),
          epsilon_(epsilon),
          delta_(delta),
          gamma_(gamma),
          r_max_(r_max),
          b_(b),
          k1_override_(k1_override) {}

    void seed(RngStream rng) override { rng_ = rng; }

    int act(int state) override {
        if (!inner_) start_phase();
        return inner_->act(state);
    }

    void observe(const Observation& obs) override {
        inner_->observe(obs);
        if (++phase_steps_ >= phase_budget_) {
            inner_.reset();
            phase_steps_ = 0;
            ++phase_index_;
        }
    }

    std::string phase() const override {
        return "t" + std::to_string(assumed_t_mix()) + ":" +
               (inner_ ? inner_->phase() : "explore");
    }

    std::string poll_event() override {
        std::string ev = inner_ ? inner_->poll_event() : std::string{};
        if (!pending_event_.empty()) {
            ev = pending_event_ + (ev.empty() ? "" : ";" + ev);
            pending_event_.clear();
        }
        return ev;
    }

    int switch_count() const override {
        return total_switches_ + (inner_ ? inner_->switch_count() : 0);
    }

    int assumed_t_mix() const { return 1 << phase_index_; }
    int phase_index() const { return phase_index_; }
    long phase_budget() const { return phase_budget_; }

    // budget of one Case-5 phase for an assumed mixing time
    static long phase_budget_for(const ProtocolSchedule& s) {
        return s.trial_count() * s.t_prime + s.q;
    }

private:
    void start_phase() {
        if (!rng_) throw std::logic_error("controller not seeded");
        if (inner_) total_switches_ += inner_->switch_count();
        const int t = assumed_t_mix();
        // gamma/2: each phase aims for the tighter factor so earlier
        // too-short phases are amortized
        ProtocolSchedule sched = compute_schedule(epsilon_, delta_, gamma_ / 2.0,
                                                  r_max_, num_agents_, t, b_);
        RmaxConfig cfg;
        cfg.epsilon = epsilon_;
        cfg.delta = delta_;
        cfg.t_mix = t;
        cfg.r_max = r_max_;
        cfg.k1_override = k1_override_;
        std::vector<std::vector<int>> trial_counts;
        for (const auto& sizes : sched.sizes_order)
            for (int i = 0; i < sched.m; ++i) trial_counts.push_back(sizes);
        phase_budget_ = phase_budget_for(sched);
        inner_ = std::make_unique<OrderExplorationController>(
            agent_id_, num_agents_, true_count_, num_states_, std::move(sched),
            std::move(cfg), std::move(trial_counts));
        inner_->seed(rng_->split());
        pending_event_ = "tmix=" + std::to_string(t);
    }

    int agent_id_;
    int num_agents_;
    int true_count_;
    int num_states_;
    double epsilon_, delta_, gamma_, r_max_;
    int b_;
    std::optional<std::int64_t> k1_override_;

    std::optional<RngStream> rng_;
    std::unique_ptr<OrderExplorationController> inner_;
    long phase_steps_ = 0;
    long phase_budget_ = 0;
    int phase_index_ = 0;
    int total_switches_ = 0;
    std::string pending_event_;
};

inline std::vector<std::unique_ptr<Case6Controller>> make_case6_controllers(
    const Cisg& game, double epsilon, double delta, double gamma, int b,
    std::optional<std::int64_t> k1_override = std::nullopt) {
    std::vector<std::unique_ptr<Case6Controller>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<Case6Controller>(
            i, game.num_agents(), game.action_counts()[i], game.num_states(),
            epsilon, delta, gamma, game.r_max(), b, k1_override));
    return out;
}

// ---------------------------------------------------------------------------
// Repeated games (single-state CISGs)

// Play uniformly at random for k^3 steps, then lock forever onto the own
// action from the earliest step that achieved the maximum observed payoff.
// Payoffs are common, so every agent locks onto the same step.
class RepeatedGameController : public AgentController {
public:
    explicit RepeatedGameController(int own_action_count)
        : own_count_(own_action_count),
          phase_len_(static_cast<long>(own_action_count) * own_action_count *
                     own_action_count) {}

    void seed(RngStream rng) override { rng_ = rng; }

    int act(int) override {
        if (locked_ >= 0) return locked_;
        return rng_->next_int(own_count_);
    }

    void observe(const Observation& obs) override {
        if (locked_ >= 0) return;
        own_actions_.push_back(obs.own_action);
        payoffs_.push_back(obs.payoff);
        if (static_cast<long>(payoffs_.size()) == phase_len_) {
            const auto best =
                std::max_element(payoffs_.begin(), payoffs_.end()); // earliest max
            locked_ = own_actions_[best - payoffs_.begin()];
            event_ = "lock";
        }
    }

    std::string phase() const override { return locked_ >= 0 ? "locked" : "random"; }

    std::string poll_event() override {
        std::string ev;
        std::swap(ev, event_);
        return ev;
    }

    long random_phase_length() const { return phase_len_; }
    int locked_action() const { return locked_; }

private:
    int own_count_;
    long phase_len_;
    std::optional<RngStream> rng_;
    std::vector<int> own_actions_;
    std::vector<double> payoffs_;
    int locked_ = -1;
    std::string event_;
};

inline std::vector<std::unique_ptr<RepeatedGameController>> make_repeated_controllers(
    const Cisg& game) {
    if (game.num_states() != 1)
        throw CisgError("repeated-game protocol requires a single-state game");
    std::vector<std::unique_ptr<RepeatedGameController>> out;
    for (int i = 0; i < game.num_agents(); ++i)
        out.push_back(std::make_unique<RepeatedGameController>(game.action_counts()[i]));
    return out;
}

} // namespace cisg
