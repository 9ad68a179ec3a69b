#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpa/env.hpp"
#include "dpa/random.hpp"

namespace dpa {

inline constexpr int kDefaultTau = 200;     // primitive-step cap per option execution
inline constexpr double kChangeDelta = 0.5; // threshold for "a variable changed"

// Temporally extended action o(a_p, a_t): repeatedly execute a_p until a_t
// becomes available, a_p stops being available, or the step cap is hit.
// Identity is the primitive pair; no state information is attached.
struct Option {
    Primitive a_p;
    std::optional<Primitive> a_t;

    std::string token() const {
        std::string t = "option(";
        t += to_string(a_p);
        t += ',';
        t += a_t ? to_string(*a_t) : "{}";
        t += ')';
        return t;
    }

    auto operator<=>(const Option&) const = default;
};

inline std::optional<Option> option_from_token(const std::string& token) {
    // option(a_p,a_t) with a_t either a primitive name or {}
    if (token.size() < 10 || token.substr(0, 7) != "option(" || token.back() != ')')
        return std::nullopt;
    std::string body = token.substr(7, token.size() - 8);
    auto comma = body.find(',');
    if (comma == std::string::npos) return std::nullopt;
    auto p = primitive_from_string(body.substr(0, comma));
    if (!p) return std::nullopt;
    std::string t = body.substr(comma + 1);
    if (t == "{}") return Option{*p, std::nullopt};
    auto at = primitive_from_string(t);
    if (!at || *at == *p) return std::nullopt;
    return Option{*p, *at};
}

struct OptionOutcome {
    LowLevelState s;
    LowLevelState s_prime;
    int steps = 0;
    bool changed = false;
    bool failed = false;  // a_p unavailable at the start: negative initiation sample
    PrimitiveSet new_available;  // availability in s_prime
};

inline bool states_differ(const LowLevelState& a, const LowLevelState& b,
                          double delta = kChangeDelta) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > delta) return true;
    return false;
}

// The termination primitive triggers only when it *becomes* available: if it
// was already available when the option started, it first has to turn off.
// Interact is instantaneous, so an interact-policy option runs a single step.
inline OptionOutcome execute_option(Environment& env, const Option& o, int tau = kDefaultTau) {
    OptionOutcome out;
    out.s = env.state();
    PrimitiveSet avail = env.available_primitives();
    if (!avail.count(o.a_p)) {
        out.s_prime = out.s;
        out.failed = true;
        out.new_available = avail;
        return out;
    }
    bool armed = !o.a_t || !avail.count(*o.a_t);
    while (out.steps < tau) {
        StepResult r = env.step_primitive(o.a_p);
        ++out.steps;
        avail = r.available;
        if (o.a_p == Primitive::Interact) break;
        if (o.a_t) {
            if (!avail.count(*o.a_t)) {
                armed = true;
            } else if (armed) {
                break;
            }
        }
        if (!avail.count(o.a_p)) break;
    }
    out.s_prime = env.state();
    out.changed = states_differ(out.s, out.s_prime);
    out.new_available = avail;
    return out;
}

// Runs the exploration-plan prefix; a step whose option is not feasible
// aborts the rest of the plan and the agent continues from where it is.
inline void execute_plan_prefix(Environment& env, const std::vector<Option>& plan,
                                int tau = kDefaultTau) {
    for (const Option& o : plan) {
        OptionOutcome out = execute_option(env, o, tau);
        if (out.failed) break;
    }
}

// Surprise-driven option discovery: run a random available primitive until it
// stops or a primitive that was unavailable at the start of the run shows up;
// record the pair if the state changed.
inline std::set<Option> discover_options(Environment& env, int d_eps, int d_steps,
                                         const std::vector<Option>& plan_ex, Rng& rng,
                                         int tau = kDefaultTau) {
    std::set<Option> found;
    for (int ep = 0; ep < d_eps; ++ep) {
        env.reset();
        execute_plan_prefix(env, plan_ex, tau);
        for (int t = 0; t < d_steps; ++t) {
            PrimitiveSet start_avail = env.available_primitives();
            if (start_avail.empty()) break;
            std::vector<Primitive> choices(start_avail.begin(), start_avail.end());
            Primitive a_p = choices[uniform_int(rng, 0, static_cast<int>(choices.size()) - 1)];

            LowLevelState s = env.state();
            PrimitiveSet avail = start_avail;
            std::optional<Primitive> a_t;
            int steps = 0;
            while (steps < tau && avail.count(a_p)) {
                StepResult r = env.step_primitive(a_p);
                ++steps;
                avail = r.available;
                for (Primitive p : kAllPrimitives) {
                    if (avail.count(p) && !start_avail.count(p)) {
                        a_t = p;
                        break;
                    }
                }
                if (a_t || a_p == Primitive::Interact) break;
            }
            if (states_differ(s, env.state())) found.insert(Option{a_p, a_t});
        }
    }
    return found;
}

}  // namespace dpa
