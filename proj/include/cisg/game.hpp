#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cisg/indexing.hpp"
#include "cisg/rng.hpp"

namespace cisg {

class CisgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SizeCapError : public CisgError {
public:
    using CisgError::CisgError;
};

inline constexpr double kRowSumTolerance = 1e-9;

// Common-interest stochastic game: every agent receives the same payoff at
// every stage. Rewards and transitions are stored against the canonical
// (identity agent order) lexicographic joint-action index. Immutable after
// construction.
class Cisg {
public:
    // Validates all invariants; throws CisgError on violation.
    Cisg(int num_states, std::vector<int> action_counts, double r_max,
         std::vector<std::vector<double>> reward,
         std::vector<std::vector<std::vector<double>>> transition)
        : num_states_(num_states),
          action_counts_(std::move(action_counts)),
          r_max_(r_max),
          reward_(std::move(reward)),
          transition_(std::move(transition)),
          indexing_(JointActionIndexing::canonical(action_counts_)) {
        validate();
    }

    int num_states() const { return num_states_; }
    int num_agents() const { return static_cast<int>(action_counts_.size()); }
    const std::vector<int>& action_counts() const { return action_counts_; }
    double r_max() const { return r_max_; }
    int num_joint_actions() const { return indexing_.num_joint(); }
    const JointActionIndexing& canonical_indexing() const { return indexing_; }

    double reward(int state, int joint) const { return reward_[state][joint]; }
    double reward(int state, const JointAction& a) const {
        return reward_[state][indexing_.index_of(a)];
    }
    const std::vector<double>& transition_row(int state, int joint) const {
        return transition_[state][joint];
    }
    const std::vector<double>& transition_row(int state, const JointAction& a) const {
        return transition_[state][indexing_.index_of(a)];
    }

    bool operator==(const Cisg& other) const {
        return num_states_ == other.num_states_ &&
               action_counts_ == other.action_counts_ &&
               r_max_ == other.r_max_ && reward_ == other.reward_ &&
               transition_ == other.transition_;
    }

private:
    void validate() const {
        if (num_states_ < 1) throw CisgError("num_states must be >= 1");
        if (num_agents() < 2) throw CisgError("num_agents must be >= 2");
        for (int c : action_counts_)
            if (c < 1) throw CisgError("action counts must be >= 1");
        if (r_max_ < 0.0) throw CisgError("r_max must be nonnegative");
        const int k = indexing_.num_joint();
        if (static_cast<int>(reward_.size()) != num_states_ ||
            static_cast<int>(transition_.size()) != num_states_)
            throw CisgError("reward/transition tables must cover all states");
        for (int s = 0; s < num_states_; ++s) {
            if (static_cast<int>(reward_[s].size()) != k ||
                static_cast<int>(transition_[s].size()) != k)
                throw CisgError("reward/transition tables must cover all joint actions");
            for (int j = 0; j < k; ++j) {
                const double r = reward_[s][j];
                if (!(r >= 0.0 && r <= r_max_))
                    throw CisgError("reward out of [0, r_max] at state " +
                                    std::to_string(s) + ", joint action " +
                                    std::to_string(j));
                const auto& row = transition_[s][j];
                if (static_cast<int>(row.size()) != num_states_)
                    throw CisgError("transition row has wrong length");
                double sum = 0.0;
                for (double p : row) {
                    if (p < 0.0) throw CisgError("negative transition probability");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance)
                    throw CisgError("transition row does not sum to 1 at state " +
                                    std::to_string(s) + ", joint action " +
                                    std::to_string(j));
            }
        }
    }

    int num_states_;
    std::vector<int> action_counts_;
    double r_max_;
    std::vector<std::vector<double>> reward_;      // [state][joint]
    std::vector<std::vector<std::vector<double>>> transition_; // [state][joint][next]
    JointActionIndexing indexing_;
};

// Single-agent MDP whose action set is the CISG's joint actions.
struct InducedMdp {
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> reward;       // [state][action]
    std::vector<std::vector<std::vector<double>>> transition; // [state][action][next]

    bool operator==(const InducedMdp&) const = default;
};

// Relabels the game's joint actions through `indexing`: induced action j is
// the CISG joint action indexing.decode(j). No renormalization.
inline InducedMdp induce_mdp(const Cisg& game, const JointActionIndexing& indexing) {
    if (indexing.action_counts != game.action_counts())
        throw CisgError("induce_mdp: indexing action counts do not match the game");
    InducedMdp mdp;
    mdp.num_states = game.num_states();
    mdp.num_actions = indexing.num_joint();
    mdp.reward.assign(mdp.num_states, std::vector<double>(mdp.num_actions));
    mdp.transition.assign(mdp.num_states, {});
    for (int s = 0; s < mdp.num_states; ++s) {
        mdp.transition[s].resize(mdp.num_actions);
        for (int j = 0; j < mdp.num_actions; ++j) {
            const JointAction a = indexing.decode(j);
            mdp.reward[s][j] = game.reward(s, a);
            mdp.transition[s][j] = game.transition_row(s, a);
        }
    }
    return mdp;
}

inline InducedMdp induce_mdp(const Cisg& game) {
    return induce_mdp(game, game.canonical_indexing());
}

struct ErgodicityReport {
    bool ergodic = false;
    // on failure: the offending pure stationary joint policy (state -> joint
    // index) and a state pair (from, to) with no path under it
    std::vector<int> witness_policy;
    int unreachable_from = -1;
    int unreachable_to = -1;
};

namespace detail {

// forward reachability over the support graph of a fixed policy's chain
inline std::vector<bool> reachable_from(const Cisg& game, const std::vector<int>& policy,
                                        int start) {
    const int n = game.num_states();
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        const auto& row = game.transition_row(s, policy[s]);
        for (int t = 0; t < n; ++t) {
            if (row[t] > 0.0 && !seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
        }
    }
    return seen;
}

} // namespace detail

// Exhaustive check over all pure stationary joint policies: the game is
// ergodic iff every policy's chain is a single communicating class. Desk
// scale only; the cap guards the (num_joint)^N enumeration.
inline ErgodicityReport check_ergodic(const Cisg& game,
                                      std::uint64_t policy_cap = 1'000'000) {
    const int n = game.num_states();
    const int k = game.num_joint_actions();
    double count = std::pow(static_cast<double>(k), n);
    if (count > static_cast<double>(policy_cap))
        throw SizeCapError("check_ergodic: policy count exceeds cap");

    std::vector<int> policy(n, 0);
    while (true) {
        for (int start = 0; start < n; ++start) {
            auto seen = detail::reachable_from(game, policy, start);
            for (int t = 0; t < n; ++t) {
                if (!seen[t]) {
                    ErgodicityReport r;
                    r.ergodic = false;
                    r.witness_policy = policy;
                    r.unreachable_from = start;
                    r.unreachable_to = t;
                    return r;
                }
            }
        }
        // next policy in odometer order
        int i = 0;
        for (; i < n; ++i) {
            if (++policy[i] < k) break;
            policy[i] = 0;
        }
        if (i == n) break;
    }
    ErgodicityReport r;
    r.ergodic = true;
    return r;
}

// Random game with a strictly positive transition floor rho: every entry of
// every transition row is >= rho, so every policy chain is irreducible and
// the game is ergodic by construction. Same seed, same game.
inline Cisg random_ergodic_cisg(int num_states, std::vector<int> action_counts,
                                double r_max, std::uint64_t seed, double rho = 0.01) {
    if (num_states < 1) throw CisgError("num_states must be >= 1");
    if (rho <= 0.0 || rho * num_states >= 1.0)
        throw CisgError("rho must satisfy 0 < rho*N < 1");
    RngStream rng(seed);
    auto indexing = JointActionIndexing::canonical(action_counts);
    const int k = indexing.num_joint();
    std::vector<std::vector<double>> reward(num_states, std::vector<double>(k));
    std::vector<std::vector<std::vector<double>>> transition(num_states);
    const double free_mass = 1.0 - rho * num_states;
    for (int s = 0; s < num_states; ++s) {
        transition[s].resize(k);
        for (int j = 0; j < k; ++j) {
            reward[s][j] = rng.next_double() * r_max;
            std::vector<double> w(num_states);
            double sum = 0.0;
            for (int t = 0; t < num_states; ++t) {
                w[t] = rng.next_double() + 1e-12;
                sum += w[t];
            }
            auto& row = transition[s][j];
            row.resize(num_states);
            double acc = 0.0;
            for (int t = 0; t < num_states; ++t) {
                row[t] = rho + free_mass * w[t] / sum;
                acc += row[t];
            }
            // pin the row sum to exactly 1
            row[num_states - 1] += 1.0 - acc;
        }
    }
    return Cisg(num_states, std::move(action_counts), r_max, std::move(reward),
                std::move(transition));
}

} // namespace cisg
