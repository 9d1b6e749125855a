#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace cisg {

// One action index per agent, executed simultaneously.
struct JointAction {
    std::vector<int> components; // indexed by agent id

    bool operator==(const JointAction&) const = default;
};

// Positional (lexicographic) bijection between joint actions and the flat
// index range [0, prod(counts)). The first agent in agent_order is the most
// significant digit. Agents that disagree on agent_order or on the assumed
// action counts hold different bijections, which is exactly what the
// coordination protocols have to overcome.
struct JointActionIndexing {
    std::vector<int> agent_order;    // permutation of agent ids, most significant first
    std::vector<int> action_counts;  // assumed count per agent id

    int num_agents() const { return static_cast<int>(action_counts.size()); }

    int num_joint() const {
        int p = 1;
        for (int c : action_counts) p *= c;
        return p;
    }

    int index_of(const JointAction& a) const {
        if (static_cast<int>(a.components.size()) != num_agents())
            throw std::invalid_argument("joint action arity mismatch");
        int idx = 0;
        for (int agent : agent_order) {
            const int c = a.components[agent];
            if (c < 0 || c >= action_counts[agent])
                throw std::out_of_range("joint action component out of range");
            idx = idx * action_counts[agent] + c;
        }
        return idx;
    }

    JointAction decode(int index) const {
        if (index < 0 || index >= num_joint())
            throw std::out_of_range("joint action index out of range");
        JointAction a;
        a.components.assign(num_agents(), 0);
        for (int i = num_agents() - 1; i >= 0; --i) {
            const int agent = agent_order[i];
            a.components[agent] = index % action_counts[agent];
            index /= action_counts[agent];
        }
        return a;
    }

    // identity agent order
    static JointActionIndexing canonical(std::vector<int> counts) {
        JointActionIndexing ix;
        ix.action_counts = std::move(counts);
        ix.agent_order.resize(ix.action_counts.size());
        std::iota(ix.agent_order.begin(), ix.agent_order.end(), 0);
        return ix;
    }

    bool operator==(const JointActionIndexing&) const = default;
};

inline int lex_index(const JointActionIndexing& ix, const JointAction& a) {
    return ix.index_of(a);
}

inline JointAction lex_decode(const JointActionIndexing& ix, int index) {
    return ix.decode(index);
}

} // namespace cisg
