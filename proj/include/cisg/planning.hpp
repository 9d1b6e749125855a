#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cisg/game.hpp"

namespace cisg {

// Pure nonstationary policy over a fixed horizon. action_at[t][s] is the
// action at step t (0-based, t steps already executed) in state s.
struct FiniteHorizonPolicy {
    int horizon = 0;
    std::vector<std::vector<int>> action_at;

    bool operator==(const FiniteHorizonPolicy&) const = default;
};

struct StationaryPolicy {
    std::vector<int> action_at; // state -> action

    bool operator==(const StationaryPolicy&) const = default;
};

struct PlanResult {
    FiniteHorizonPolicy policy;
    // value[t][s] = optimal expected total reward over t remaining steps,
    // t = 0..horizon; value[0] is identically zero
    std::vector<std::vector<double>> value;
};

// Backward induction with zero terminal values. Argmax ties are always
// broken toward the lowest action index, so the result is a deterministic
// function of (mdp, horizon) — the property the coordination protocols rely
// on.
inline PlanResult finite_horizon_plan(const InducedMdp& mdp, int horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const int n = mdp.num_states;
    const int k = mdp.num_actions;
    PlanResult res;
    res.policy.horizon = horizon;
    res.policy.action_at.assign(horizon, std::vector<int>(n, 0));
    res.value.assign(horizon + 1, std::vector<double>(n, 0.0));
    for (int t = 1; t <= horizon; ++t) {
        const auto& prev = res.value[t - 1];
        for (int s = 0; s < n; ++s) {
            double best = -1.0;
            int best_a = 0;
            for (int a = 0; a < k; ++a) {
                double q = mdp.reward[s][a];
                const auto& row = mdp.transition[s][a];
                for (int s2 = 0; s2 < n; ++s2) q += row[s2] * prev[s2];
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            res.value[t][s] = best;
            // step index: t remaining steps means this decision is taken at
            // step horizon - t
            res.policy.action_at[horizon - t][s] = best_a;
        }
    }
    return res;
}

namespace detail {

template <typename ActionAt>
double expected_average(const InducedMdp& mdp, ActionAt&& action_at, int start_state,
                        int t) {
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    const int n = mdp.num_states;
    std::vector<double> dist(n, 0.0), next(n);
    dist[start_state] = 1.0;
    double total = 0.0;
    for (int step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < n; ++s) {
            if (dist[s] == 0.0) continue;
            const int a = action_at(step, s);
            total += dist[s] * mdp.reward[s][a];
            const auto& row = mdp.transition[s][a];
            for (int s2 = 0; s2 < n; ++s2) next[s2] += dist[s] * row[s2];
        }
        dist.swap(next);
    }
    return total / t;
}

} // namespace detail

// Exact expected t-step average reward via forward distribution propagation.
// A finite-horizon policy shorter than t is followed cyclically (replanned
// positionally), matching how the learner executes plans.
inline double expected_t_step_average(const InducedMdp& mdp,
                                      const FiniteHorizonPolicy& policy,
                                      int start_state, int t) {
    return detail::expected_average(
        mdp,
        [&](int step, int s) { return policy.action_at[step % policy.horizon][s]; },
        start_state, t);
}

inline double expected_t_step_average(const InducedMdp& mdp,
                                      const StationaryPolicy& policy, int start_state,
                                      int t) {
    return detail::expected_average(
        mdp, [&](int, int s) { return policy.action_at[s]; }, start_state, t);
}

namespace detail {

// Gaussian elimination with partial pivoting; a is n x (n+1) augmented.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-13)
            throw CisgError("singular linear system (non-irreducible chain?)");
        std::swap(a[col], a[pivot]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return x;
}

} // namespace detail

// Stationary distribution of the policy's chain (pi P = pi, sum pi = 1),
// solved directly with the normalization equation replacing one balance row.
// Requires an irreducible chain.
inline std::vector<double> stationary_distribution(const InducedMdp& mdp,
                                                   const StationaryPolicy& policy) {
    const int n = mdp.num_states;
    // rows: (P^T - I) pi = 0 for states 0..n-2, then sum pi = 1
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int row = 0; row < n - 1; ++row) {
        for (int s = 0; s < n; ++s)
            a[row][s] = mdp.transition[s][policy.action_at[s]][row];
        a[row][row] -= 1.0;
        a[row][n] = 0.0;
    }
    for (int s = 0; s < n; ++s) a[n - 1][s] = 1.0;
    a[n - 1][n] = 1.0;
    auto pi = detail::solve_linear(std::move(a));
    // residual check: ||pi P - pi||_inf
    double resid = 0.0;
    for (int t = 0; t < n; ++t) {
        double v = 0.0;
        for (int s = 0; s < n; ++s) v += pi[s] * mdp.transition[s][policy.action_at[s]][t];
        resid = std::max(resid, std::abs(v - pi[t]));
    }
    if (resid >= 1e-9)
        throw CisgError("stationary distribution residual too large");
    return pi;
}

// Long-run average reward (gain) of a pure stationary policy on an
// irreducible chain; start-state independent.
inline double stationary_average_reward(const InducedMdp& mdp,
                                        const StationaryPolicy& policy) {
    auto pi = stationary_distribution(mdp, policy);
    double gain = 0.0;
    for (int s = 0; s < mdp.num_states; ++s)
        gain += pi[s] * mdp.reward[s][policy.action_at[s]];
    return gain;
}

struct ValueReport {
    double optimal_value = 0.0;
    StationaryPolicy argmax_policy;
    std::optional<std::vector<double>> per_policy_gain; // indexed by odometer order
};

// Brute-force optimal average reward: enumerates every pure stationary
// policy and returns the maximal gain with the lowest-lexicographic argmax.
inline ValueReport optimal_value_oracle(const InducedMdp& mdp,
                                        std::uint64_t policy_cap = 1'000'000,
                                        bool keep_table = false) {
    const int n = mdp.num_states;
    const int k = mdp.num_actions;
    if (std::pow(static_cast<double>(k), n) > static_cast<double>(policy_cap))
        throw SizeCapError("optimal_value_oracle: policy count exceeds cap");
    ValueReport report;
    report.optimal_value = -1.0;
    if (keep_table) report.per_policy_gain.emplace();
    StationaryPolicy policy;
    policy.action_at.assign(n, 0);
    while (true) {
        const double gain = stationary_average_reward(mdp, policy);
        if (keep_table) report.per_policy_gain->push_back(gain);
        if (gain > report.optimal_value + 1e-12) {
            report.optimal_value = gain;
            report.argmax_policy = policy;
        }
        // lexicographic successor with the LAST state as least significant
        // digit keeps the first maximal policy lowest-lexicographic
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++policy.action_at[i] < k) break;
            policy.action_at[i] = 0;
        }
        if (i < 0) break;
    }
    return report;
}

// Least horizon T <= t_cap such that for every start state and every t' in
// [T, t_cap], the expected t'-step average stays strictly above gain - eps.
// The unbounded upper quantifier is truncated at t_cap.
inline std::optional<int> epsilon_mixing_time(const InducedMdp& mdp,
                                              const StationaryPolicy& policy,
                                              double eps, int t_cap) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (t_cap < 1) throw std::invalid_argument("t_cap must be >= 1");
    const double gain = stationary_average_reward(mdp, policy);
    const int n = mdp.num_states;
    // per start state, propagate the distribution once and record every
    // prefix average
    std::vector<bool> good(t_cap + 1, true); // good[t'] for t' in 1..t_cap
    for (int start = 0; start < n; ++start) {
        std::vector<double> dist(n, 0.0), next(n);
        dist[start] = 1.0;
        double total = 0.0;
        for (int t = 1; t <= t_cap; ++t) {
            std::fill(next.begin(), next.end(), 0.0);
            for (int s = 0; s < n; ++s) {
                if (dist[s] == 0.0) continue;
                const int a = policy.action_at[s];
                total += dist[s] * mdp.reward[s][a];
                const auto& row = mdp.transition[s][a];
                for (int s2 = 0; s2 < n; ++s2) next[s2] += dist[s] * row[s2];
            }
            dist.swap(next);
            if (!(total / t > gain - eps)) good[t] = false;
        }
    }
    int t_mix = -1;
    for (int t = t_cap; t >= 1; --t) {
        if (!good[t]) break;
        t_mix = t;
    }
    if (t_mix < 0) return std::nullopt;
    return t_mix;
}

// Default truncation cap for the mixing-time search.
inline int default_mixing_cap(int num_states, int max_action_count, double r_max,
                              double eps) {
    return 10 * num_states * max_action_count *
           static_cast<int>(std::ceil(r_max / eps));
}

} // namespace cisg
