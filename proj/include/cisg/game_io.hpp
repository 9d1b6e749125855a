#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cisg/game.hpp"

namespace cisg {

class ParseError : public CisgError {
public:
    ParseError(int line, const std::string& what)
        : CisgError("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

struct LineTokens {
    int line_no;
    std::vector<std::string> tokens;
};

inline std::vector<LineTokens> tokenize_spec(const std::string& text) {
    std::vector<LineTokens> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        LineTokens lt{line_no, {}};
        std::string tok;
        while (ls >> tok) lt.tokens.push_back(tok);
        if (!lt.tokens.empty()) out.push_back(std::move(lt));
    }
    return out;
}

inline int parse_int(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer, got '" + tok + "'");
    }
}

inline double parse_real(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected number, got '" + tok + "'");
    }
}

} // namespace detail

// Parses the line-oriented game-spec format. Reward and transition lines may
// appear in any order after the header block. Omitted (s, a.., s') transition
// entries mean probability 0; every (s, joint action) needs total mass 1 and
// a reward line.
inline Cisg parse_game_spec(const std::string& text) {
    using detail::parse_int;
    using detail::parse_real;
    auto lines = detail::tokenize_spec(text);
    std::size_t pos = 0;
    auto expect_line = [&](const std::string& what) -> const detail::LineTokens& {
        if (pos >= lines.size()) throw ParseError(lines.empty() ? 1 : lines.back().line_no,
                                                  "unexpected end of document, expected " + what);
        return lines[pos++];
    };

    {
        const auto& l = expect_line("'cisg v1'");
        if (l.tokens.size() != 2 || l.tokens[0] != "cisg" || l.tokens[1] != "v1")
            throw ParseError(l.line_no, "expected header 'cisg v1'");
    }
    int num_states = 0, num_agents = 0;
    {
        const auto& l = expect_line("'states <N>'");
        if (l.tokens.size() != 2 || l.tokens[0] != "states")
            throw ParseError(l.line_no, "expected 'states <N>'");
        num_states = parse_int(l.tokens[1], l.line_no);
        if (num_states < 1) throw ParseError(l.line_no, "states must be >= 1");
    }
    {
        const auto& l = expect_line("'agents <n>'");
        if (l.tokens.size() != 2 || l.tokens[0] != "agents")
            throw ParseError(l.line_no, "expected 'agents <n>'");
        num_agents = parse_int(l.tokens[1], l.line_no);
        if (num_agents < 2) throw ParseError(l.line_no, "agents must be >= 2");
    }
    std::vector<int> counts;
    {
        const auto& l = expect_line("'actions <f_1> ... <f_n>'");
        if (l.tokens.size() != static_cast<std::size_t>(num_agents) + 1 ||
            l.tokens[0] != "actions")
            throw ParseError(l.line_no, "expected 'actions' with one count per agent");
        for (int i = 1; i <= num_agents; ++i) {
            int c = parse_int(l.tokens[i], l.line_no);
            if (c < 1) throw ParseError(l.line_no, "action counts must be >= 1");
            counts.push_back(c);
        }
    }
    double r_max = 0.0;
    {
        const auto& l = expect_line("'rmax <R>'");
        if (l.tokens.size() != 2 || l.tokens[0] != "rmax")
            throw ParseError(l.line_no, "expected 'rmax <R>'");
        r_max = parse_real(l.tokens[1], l.line_no);
        if (r_max < 0.0) throw ParseError(l.line_no, "rmax must be nonnegative");
    }

    auto indexing = JointActionIndexing::canonical(counts);
    const int k = indexing.num_joint();
    std::vector<std::vector<std::optional<double>>> reward(
        num_states, std::vector<std::optional<double>>(k));
    std::vector<std::vector<std::vector<std::optional<double>>>> trans(
        num_states,
        std::vector<std::vector<std::optional<double>>>(
            k, std::vector<std::optional<double>>(num_states)));

    auto parse_cell = [&](const detail::LineTokens& l, std::size_t offset) {
        int s = parse_int(l.tokens[offset], l.line_no);
        if (s < 0 || s >= num_states) throw ParseError(l.line_no, "state out of range");
        JointAction a;
        for (int i = 0; i < num_agents; ++i) {
            int c = parse_int(l.tokens[offset + 1 + i], l.line_no);
            if (c < 0 || c >= counts[i])
                throw ParseError(l.line_no, "action index out of range for agent " +
                                                std::to_string(i));
            a.components.push_back(c);
        }
        return std::pair<int, int>{s, indexing.index_of(a)};
    };

    auto describe_cell = [&](int s, int j) {
        std::string desc = "(state " + std::to_string(s) + ", joint action";
        for (int c : indexing.decode(j).components) desc += " " + std::to_string(c);
        return desc + ")";
    };

    for (; pos < lines.size(); ++pos) {
        const auto& l = lines[pos];
        if (l.tokens[0] == "reward") {
            if (l.tokens.size() != static_cast<std::size_t>(num_agents) + 3)
                throw ParseError(l.line_no, "malformed reward line");
            auto [s, j] = parse_cell(l, 1);
            double r = parse_real(l.tokens.back(), l.line_no);
            if (r < 0.0 || r > r_max)
                throw ParseError(l.line_no, "reward out of [0, rmax]");
            if (reward[s][j].has_value())
                throw ParseError(l.line_no, "duplicate reward entry for " + describe_cell(s, j));
            reward[s][j] = r;
        } else if (l.tokens[0] == "trans") {
            if (l.tokens.size() != static_cast<std::size_t>(num_agents) + 4)
                throw ParseError(l.line_no, "malformed trans line");
            auto [s, j] = parse_cell(l, 1);
            int s2 = parse_int(l.tokens[l.tokens.size() - 2], l.line_no);
            if (s2 < 0 || s2 >= num_states)
                throw ParseError(l.line_no, "next state out of range");
            double p = parse_real(l.tokens.back(), l.line_no);
            if (p < 0.0) throw ParseError(l.line_no, "negative probability");
            if (trans[s][j][s2].has_value())
                throw ParseError(l.line_no, "duplicate trans entry for " + describe_cell(s, j) +
                                                " -> " + std::to_string(s2));
            trans[s][j][s2] = p;
        } else {
            throw ParseError(l.line_no, "unknown directive '" + l.tokens[0] + "'");
        }
    }

    std::vector<std::vector<double>> reward_out(num_states, std::vector<double>(k));
    std::vector<std::vector<std::vector<double>>> trans_out(num_states);
    for (int s = 0; s < num_states; ++s) {
        trans_out[s].assign(k, std::vector<double>(num_states, 0.0));
        for (int j = 0; j < k; ++j) {
            if (!reward[s][j].has_value())
                throw CisgError("missing reward entry for " + describe_cell(s, j));
            reward_out[s][j] = *reward[s][j];
            double sum = 0.0;
            bool any = false;
            for (int t = 0; t < num_states; ++t) {
                if (trans[s][j][t].has_value()) {
                    any = true;
                    trans_out[s][j][t] = *trans[s][j][t];
                    sum += *trans[s][j][t];
                }
            }
            if (!any)
                throw CisgError("missing transition entries for " + describe_cell(s, j));
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw CisgError("transition mass for " + describe_cell(s, j) +
                                " sums to " + std::to_string(sum) + ", expected 1");
        }
    }
    return Cisg(num_states, std::move(counts), r_max, std::move(reward_out),
                std::move(trans_out));
}

// Inverse of parse_game_spec up to formatting; zero transition entries are
// omitted per the grammar.
inline std::string serialize_game(const Cisg& game) {
    std::ostringstream out;
    out.precision(17);
    out << "cisg v1\n";
    out << "states " << game.num_states() << "\n";
    out << "agents " << game.num_agents() << "\n";
    out << "actions";
    for (int c : game.action_counts()) out << " " << c;
    out << "\n";
    out << "rmax " << game.r_max() << "\n";
    const auto& ix = game.canonical_indexing();
    for (int s = 0; s < game.num_states(); ++s) {
        for (int j = 0; j < game.num_joint_actions(); ++j) {
            out << "reward " << s;
            for (int c : ix.decode(j).components) out << " " << c;
            out << " " << game.reward(s, j) << "\n";
        }
    }
    for (int s = 0; s < game.num_states(); ++s) {
        for (int j = 0; j < game.num_joint_actions(); ++j) {
            const auto& row = game.transition_row(s, j);
            for (int t = 0; t < game.num_states(); ++t) {
                if (row[t] == 0.0) continue;
                out << "trans " << s;
                for (int c : ix.decode(j).components) out << " " << c;
                out << " " << t << " " << row[t] << "\n";
            }
        }
    }
    return out.str();
}

inline Cisg load_game_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CisgError("cannot open game file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_game_spec(buf.str());
}

} // namespace cisg
