#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace cisg {

struct StepRecord {
    long step = 0;
    int state = 0;
    std::vector<int> actions; // per agent (single entry for centralized runs)
    double payoff = 0.0;
    std::string phase; // '/'-joined per-agent phase tags
    std::string event; // '/'-joined per-agent protocol events, empty if none

    bool operator==(const StepRecord&) const = default;
};

// Append-only per-step trace. Everything downstream (metrics, determinism
// checks, CSV artifacts) is computed from this.
struct RunLog {
    std::vector<StepRecord> records;
    std::uint64_t master_seed = 0;
    double total_payoff = 0.0;

    void append(StepRecord rec) {
        total_payoff += rec.payoff;
        records.push_back(std::move(rec));
    }

    long steps() const { return static_cast<long>(records.size()); }

    double running_average() const {
        return records.empty() ? 0.0 : total_payoff / static_cast<double>(records.size());
    }

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        out << "step,state,actions,payoff,phase,event\n";
        for (const auto& r : records) {
            out << r.step << "," << r.state << ",";
            for (std::size_t i = 0; i < r.actions.size(); ++i) {
                if (i) out << "/";
                out << r.actions[i];
            }
            out << "," << r.payoff << "," << r.phase << "," << r.event << "\n";
        }
        return out.str();
    }

    bool operator==(const RunLog& other) const { return records == other.records; }
};

} // namespace cisg
