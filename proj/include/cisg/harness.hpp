#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cisg/game.hpp"
#include "cisg/planning.hpp"
#include "cisg/rng.hpp"
#include "cisg/runlog.hpp"

namespace cisg {

enum class Monitoring { perfect, imperfect };

inline const char* to_string(Monitoring m) {
    return m == Monitoring::perfect ? "perfect" : "imperfect";
}

// What one agent sees after a stage. Under imperfect monitoring the harness
// never populates others_actions, so a protocol that needs it fails loudly
// instead of silently reading stale data.
struct Observation {
    int state = 0;
    int own_action = 0;
    double payoff = 0.0;
    int next_state = 0;
    std::optional<std::vector<int>> others_actions; // indexed by agent id; own slot = own action

    const std::vector<int>& others() const {
        if (!others_actions)
            throw CisgError("others_actions accessed under imperfect monitoring");
        return *others_actions;
    }
};

// A per-agent controller. Reads only its own observations; the harness is
// the sole owner of global state.
class AgentController {
public:
    virtual ~AgentController() = default;

    // called once before the first step with this agent's private stream
    virtual void seed(RngStream rng) { (void)rng; }

    virtual int act(int state) = 0;
    virtual void observe(const Observation& obs) = 0;

    virtual std::string phase() const { return "run"; }
    // protocol events since the last poll (consumed on read)
    virtual std::string poll_event() { return {}; }
    virtual int switch_count() const { return 0; }
};

// Lockstep synchronous driver: every agent acts simultaneously each stage,
// the environment samples the next state, and monitoring-filtered
// observations go back to the controllers. Stream 0 is the environment;
// stream i+1 is agent i.
inline RunLog run_simulation(const Cisg& game,
                             const std::vector<AgentController*>& controllers,
                             Monitoring monitoring, std::uint64_t master_seed,
                             long num_steps, int start_state = 0) {
    const int n = game.num_agents();
    if (static_cast<int>(controllers.size()) != n)
        throw CisgError("run_simulation: controller count must equal num_agents");
    RngStream env_rng = derive_stream(master_seed, 0);
    for (int i = 0; i < n; ++i)
        controllers[i]->seed(derive_stream(master_seed, static_cast<std::uint64_t>(i) + 1));

    RunLog log;
    log.master_seed = master_seed;
    int state = start_state;
    JointAction joint;
    joint.components.resize(n);
    for (long step = 0; step < num_steps; ++step) {
        for (int i = 0; i < n; ++i) {
            const int a = controllers[i]->act(state);
            if (a < 0 || a >= game.action_counts()[i])
                throw CisgError("agent " + std::to_string(i) +
                                " returned out-of-range action " + std::to_string(a));
            joint.components[i] = a;
        }
        // capture the phase the action was taken in, before observe advances it
        std::string phase_col;
        for (int i = 0; i < n; ++i) {
            if (i) phase_col += "/";
            phase_col += controllers[i]->phase();
        }
        const double payoff = game.reward(state, joint);
        const int next = env_rng.sample(game.transition_row(state, joint));
        for (int i = 0; i < n; ++i) {
            Observation obs;
            obs.state = state;
            obs.own_action = joint.components[i];
            obs.payoff = payoff;
            obs.next_state = next;
            if (monitoring == Monitoring::perfect)
                obs.others_actions = joint.components;
            controllers[i]->observe(obs);
        }
        StepRecord rec;
        rec.step = step;
        rec.state = state;
        rec.actions = joint.components;
        rec.payoff = payoff;
        rec.phase = std::move(phase_col);
        for (int i = 0; i < n; ++i) {
            if (i) rec.event += "/";
            rec.event += controllers[i]->poll_event();
        }
        if (rec.event.find_first_not_of('/') == std::string::npos) rec.event.clear();
        log.append(std::move(rec));
        state = next;
    }
    return log;
}

struct Metrics {
    double running_average = 0.0;
    double v_opt = 0.0;
    double target = 0.0; // (1 - gamma) * (v(M) - 2*eps)
    std::optional<long> time_to_target;
};

// Scores a log against the brute-force optimal value of the game.
inline Metrics evaluate_against_oracle(const RunLog& log, const Cisg& game,
                                       double epsilon, double gamma,
                                       std::uint64_t policy_cap = 1'000'000) {
    Metrics m;
    const InducedMdp mdp = induce_mdp(game);
    m.v_opt = optimal_value_oracle(mdp, policy_cap).optimal_value;
    m.target = (1.0 - gamma) * (m.v_opt - 2.0 * epsilon);
    double total = 0.0;
    for (const auto& rec : log.records) {
        total += rec.payoff;
        const double avg = total / static_cast<double>(rec.step + 1);
        if (!m.time_to_target && avg >= m.target) m.time_to_target = rec.step;
    }
    m.running_average = log.running_average();
    return m;
}

} // namespace cisg
