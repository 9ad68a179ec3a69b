#pragma once

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpa/option.hpp"

namespace dpa {

// Sorted indices of the state variables an execution changed.
using Mask = std::vector<int>;

inline Mask compute_mask(const LowLevelState& s, const LowLevelState& s_prime,
                         double delta = kChangeDelta) {
    if (s.size() != s_prime.size())
        throw std::invalid_argument("compute_mask: state length mismatch");
    Mask m;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i] - s_prime[i]) > delta) m.push_back(static_cast<int>(i));
    return m;
}

struct InitiationTuple {
    LowLevelState s;
    Option option;
    bool feasible = false;
};

struct TransitionTuple {
    LowLevelState s;
    Option option;
    double r = 0.0;  // reward = -(primitive steps)
    LowLevelState s_prime;
    bool g = false;  // game goal reached in s_prime
    Mask mask;
    std::vector<Option> o_prime;  // options executable from s_prime
};

struct Datasets {
    std::vector<InitiationTuple> id;
    std::vector<TransitionTuple> td;
};

// Option-level random walk (Alg. 1's Collect_Data): per episode run the
// exploration-plan prefix, then dpa_steps uniformly random option executions.
// Infeasible picks are logged as negative initiation samples and re-drawn
// without consuming the step, so each step spends its budget on a transition.
// Transitions are only recorded when the mask is nonempty.
inline Datasets collect_data(Environment& env, int dpa_eps, int dpa_steps,
                             const std::vector<Option>& options,
                             const std::vector<Option>& plan_ex, Rng& rng,
                             int tau = kDefaultTau) {
    Datasets out;
    if (options.empty()) return out;
    for (int ep = 0; ep < dpa_eps; ++ep) {
        env.reset();
        execute_plan_prefix(env, plan_ex, tau);
        for (int t = 0; t < dpa_steps; ++t) {
            LowLevelState s = env.state();
            auto avail = env.available_primitives();
            const Option* chosen = nullptr;
            for (int tries = 0; tries < 4 * static_cast<int>(options.size()); ++tries) {
                const Option& o =
                    options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
                bool feasible = avail.count(o.a_p) > 0;
                out.id.push_back(InitiationTuple{s, o, feasible});
                if (feasible) {
                    chosen = &o;
                    break;
                }
            }
            if (!chosen) break;  // dead end: nothing executable
            OptionOutcome res = execute_option(env, *chosen, tau);
            Mask m = compute_mask(res.s, res.s_prime);
            if (m.empty()) continue;
            TransitionTuple td;
            td.s = std::move(res.s);
            td.option = *chosen;
            td.r = -static_cast<double>(res.steps);
            td.s_prime = std::move(res.s_prime);
            td.g = env.goal_reached();
            td.mask = std::move(m);
            for (const Option& cand : options)
                if (res.new_available.count(cand.a_p)) td.o_prime.push_back(cand);
            out.td.push_back(std::move(td));
        }
    }
    return out;
}

// --- line-delimited record file ------------------------------------------
// ID|s...|option|feasible
// TD|s...|option|r|s'...|g|mask|O'

namespace detail {

inline std::string join_reals(const LowLevelState& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

inline LowLevelState parse_reals(const std::string& s) {
    LowLevelState v;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string tok;
    std::istringstream is(line);
    while (std::getline(is, tok, sep)) parts.push_back(tok);
    return parts;
}

}  // namespace detail

inline std::string to_line(const InitiationTuple& t) {
    return "ID|" + detail::join_reals(t.s) + "|" + t.option.token() + "|" +
           (t.feasible ? "1" : "0");
}

inline std::string to_line(const TransitionTuple& t) {
    std::ostringstream os;
    os << "TD|" << detail::join_reals(t.s) << '|' << t.option.token() << '|' << t.r << '|'
       << detail::join_reals(t.s_prime) << '|' << (t.g ? 1 : 0) << '|';
    for (std::size_t i = 0; i < t.mask.size(); ++i) {
        if (i) os << ',';
        os << t.mask[i];
    }
    os << '|';
    for (std::size_t i = 0; i < t.o_prime.size(); ++i) {
        if (i) os << ';';
        os << t.o_prime[i].token();
    }
    return os.str();
}

inline void write_datasets(std::ostream& out, const Datasets& data) {
    for (const auto& t : data.id) out << to_line(t) << '\n';
    for (const auto& t : data.td) out << to_line(t) << '\n';
}

inline Datasets parse_datasets(std::istream& in) {
    Datasets data;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parts = detail::split(line, '|');
        auto bad = [&](const std::string& why) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + why);
        };
        if (parts[0] == "ID") {
            if (parts.size() != 4) bad("expected 4 fields for ID record");
            auto o = option_from_token(parts[2]);
            if (!o) bad("bad option token '" + parts[2] + "'");
            data.id.push_back(InitiationTuple{detail::parse_reals(parts[1]), *o, parts[3] == "1"});
        } else if (parts[0] == "TD") {
            if (parts.size() < 7) bad("expected 8 fields for TD record");
            auto o = option_from_token(parts[2]);
            if (!o) bad("bad option token '" + parts[2] + "'");
            TransitionTuple t;
            t.s = detail::parse_reals(parts[1]);
            t.option = *o;
            t.r = std::stod(parts[3]);
            t.s_prime = detail::parse_reals(parts[4]);
            t.g = parts[5] == "1";
            for (const auto& tok : detail::split(parts[6], ','))
                if (!tok.empty()) t.mask.push_back(std::stoi(tok));
            if (parts.size() > 7)
                for (const auto& tok : detail::split(parts[7], ';'))
                    if (auto op = option_from_token(tok)) t.o_prime.push_back(*op);
            data.td.push_back(std::move(t));
        } else {
            bad("unknown record type '" + parts[0] + "'");
        }
    }
    return data;
}

}  // namespace dpa
