#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpa {

// Propositional probabilistic STRIPS fragment:
//   :requirements :strips :probabilistic-effects :rewards
//   zero-parameter actions, conjunctive preconditions, probabilistic effect
//   outcomes with add/delete sets and a "(decrease (reward) c)" cost.

struct PpddlParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EffectOutcome {
    double probability = 1.0;
    std::vector<std::string> add;
    std::vector<std::string> del;
    double cost = 0.0;
};

struct PpddlOperator {
    std::string name;
    std::vector<std::string> precondition;
    std::vector<EffectOutcome> outcomes;
};

struct PpddlDomain {
    std::string name;
    std::vector<std::string> predicates;
    std::vector<PpddlOperator> operators;
};

struct PpddlProblem {
    std::string name;
    std::string domain_name;
    std::vector<std::string> init;
    std::vector<std::string> goal;
};

// notfailed sorts first, then symbol_<k> numerically, then anything else.
inline bool predicate_less(const std::string& a, const std::string& b) {
    auto rank = [](const std::string& p) -> std::pair<int, long> {
        if (p == "notfailed") return {0, 0};
        if (p.starts_with("symbol_")) {
            long k = -1;
            auto body = p.substr(7);
            auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), k);
            if (ec == std::errc() && ptr == body.data() + body.size()) return {1, k};
        }
        return {2, 0};
    };
    auto ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

inline std::vector<std::string> sorted_predicates(std::vector<std::string> v) {
    std::sort(v.begin(), v.end(), predicate_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

namespace sexpr {

struct Node {
    std::string atom;  // empty for lists
    std::vector<Node> children;
    bool is_atom() const { return children.empty() && !atom.empty(); }
};

inline std::vector<Node> parse_all(const std::string& text) {
    std::vector<Node> roots;
    std::vector<Node*> stack;
    std::size_t i = 0;
    auto push_atom = [&](const std::string& a) {
        if (stack.empty()) throw PpddlParseError("atom '" + a + "' outside any list");
        stack.back()->children.push_back(Node{a, {}});
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(') {
            if (stack.empty()) {
                roots.push_back(Node{});
                stack.push_back(&roots.back());
            } else {
                stack.back()->children.push_back(Node{});
                stack.push_back(&stack.back()->children.back());
            }
            ++i;
        } else if (c == ')') {
            if (stack.empty()) throw PpddlParseError("unbalanced ')'");
            stack.pop_back();
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')')
                ++j;
            push_atom(text.substr(i, j - i));
            i = j;
        }
    }
    if (!stack.empty()) throw PpddlParseError("unbalanced '('");
    return roots;
}

inline const Node& expect_list(const Node& n, const std::string& what) {
    if (n.is_atom()) throw PpddlParseError("expected a list for " + what);
    return n;
}

}  // namespace sexpr

namespace detail {

inline std::string head(const sexpr::Node& n) {
    if (n.children.empty() || !n.children[0].is_atom()) return "";
    return n.children[0].atom;
}

inline void check_declared(const std::string& pred, const std::set<std::string>& declared,
                           const std::string& ctx) {
    if (!declared.count(pred))
        throw PpddlParseError("undeclared predicate '" + pred + "' in " + ctx);
}

inline std::string single_pred(const sexpr::Node& n, const std::string& ctx) {
    if (n.children.size() != 1 || !n.children[0].is_atom())
        throw PpddlParseError("expected a proposition in " + ctx);
    return n.children[0].atom;
}

// One deterministic conjunct: predicates, (not ...) and (decrease (reward) c).
inline EffectOutcome parse_outcome(const sexpr::Node& n, const std::set<std::string>& declared,
                                   const std::string& ctx) {
    EffectOutcome out;
    if (head(n) != "and") throw PpddlParseError("expected (and ...) effect in " + ctx);
    for (std::size_t i = 1; i < n.children.size(); ++i) {
        const auto& item = n.children[i];
        std::string h = head(item);
        if (h == "not") {
            if (item.children.size() != 2)
                throw PpddlParseError("malformed (not ...) in " + ctx);
            std::string p = single_pred(item.children[1], ctx);
            check_declared(p, declared, ctx);
            out.del.push_back(p);
        } else if (h == "decrease") {
            if (item.children.size() != 3 || !item.children[2].is_atom())
                throw PpddlParseError("malformed (decrease (reward) c) in " + ctx);
            out.cost = std::stod(item.children[2].atom);
        } else {
            std::string p = single_pred(item, ctx);
            check_declared(p, declared, ctx);
            out.add.push_back(p);
        }
    }
    return out;
}

}  // namespace detail

inline PpddlDomain parse_ppddl_domain(const std::string& text) {
    auto roots = sexpr::parse_all(text);
    if (roots.size() != 1 || detail::head(roots[0]) != "define")
        throw PpddlParseError("expected a single (define (domain ...)) form");
    const auto& def = roots[0];
    PpddlDomain d;
    std::set<std::string> declared;
    for (std::size_t i = 1; i < def.children.size(); ++i) {
        const auto& sec = def.children[i];
        std::string h = detail::head(sec);
        if (h == "domain") {
            if (sec.children.size() != 2 || !sec.children[1].is_atom())
                throw PpddlParseError("malformed (domain name)");
            d.name = sec.children[1].atom;
        } else if (h == ":requirements") {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                const std::string& req = sec.children[j].atom;
                if (req != ":strips" && req != ":probabilistic-effects" && req != ":rewards")
                    throw PpddlParseError("unknown requirement flag " + req);
            }
        } else if (h == ":predicates") {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                std::string p = detail::single_pred(sec.children[j], ":predicates");
                d.predicates.push_back(p);
                declared.insert(p);
            }
        } else if (h == ":action") {
            PpddlOperator op;
            if (sec.children.size() < 2 || !sec.children[1].is_atom())
                throw PpddlParseError("action without a name");
            op.name = sec.children[1].atom;
            for (std::size_t j = 2; j + 1 < sec.children.size(); j += 2) {
                std::string key = sec.children[j].atom;
                const auto& val = sec.children[j + 1];
                if (key == ":parameters") {
                    if (!val.children.empty())
                        throw PpddlParseError("parameters are not supported (" + op.name + ")");
                } else if (key == ":precondition") {
                    if (detail::head(val) != "and")
                        throw PpddlParseError("expected (and ...) precondition in " + op.name);
                    for (std::size_t k = 1; k < val.children.size(); ++k) {
                        std::string p = detail::single_pred(val.children[k], op.name);
                        detail::check_declared(p, declared, op.name + " precondition");
                        op.precondition.push_back(p);
                    }
                } else if (key == ":effect") {
                    if (detail::head(val) == "probabilistic") {
                        double total = 0;
                        for (std::size_t k = 1; k + 1 < val.children.size(); k += 2) {
                            if (!val.children[k].is_atom())
                                throw PpddlParseError("malformed probabilistic clause in " +
                                                      op.name);
                            EffectOutcome out = detail::parse_outcome(
                                val.children[k + 1], declared, op.name);
                            out.probability = std::stod(val.children[k].atom);
                            if (out.probability < 0.0 || out.probability > 1.0)
                                throw PpddlParseError("probability outside [0,1] in " + op.name);
                            total += out.probability;
                            op.outcomes.push_back(std::move(out));
                        }
                        if (total > 1.0 + 1e-9)
                            throw PpddlParseError("probabilities sum to more than 1 in " +
                                                  op.name);
                        if (total < 1.0 - 1e-9) {
                            // standard PPDDL: the remaining mass is a no-op
                            EffectOutcome noop;
                            noop.probability = 1.0 - total;
                            op.outcomes.push_back(noop);
                        }
                    } else {
                        op.outcomes.push_back(detail::parse_outcome(val, declared, op.name));
                    }
                } else {
                    throw PpddlParseError("unknown action keyword " + key + " in " + op.name);
                }
            }
            if (op.outcomes.empty())
                throw PpddlParseError("action " + op.name + " has no effect");
            d.operators.push_back(std::move(op));
        } else {
            throw PpddlParseError("unknown domain section '" + h + "'");
        }
    }
    return d;
}

inline PpddlProblem parse_ppddl_problem(const std::string& text, const PpddlDomain& domain) {
    auto roots = sexpr::parse_all(text);
    if (roots.size() != 1 || detail::head(roots[0]) != "define")
        throw PpddlParseError("expected a single (define (problem ...)) form");
    std::set<std::string> declared(domain.predicates.begin(), domain.predicates.end());
    PpddlProblem p;
    bool saw_goal = false;
    for (std::size_t i = 1; i < roots[0].children.size(); ++i) {
        const auto& sec = roots[0].children[i];
        std::string h = detail::head(sec);
        if (h == "problem") {
            p.name = sec.children.at(1).atom;
        } else if (h == ":domain") {
            p.domain_name = sec.children.at(1).atom;
        } else if (h == ":init") {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                std::string pred = detail::single_pred(sec.children[j], ":init");
                detail::check_declared(pred, declared, ":init");
                p.init.push_back(pred);
            }
        } else if (h == ":goal") {
            if (sec.children.size() != 2 || detail::head(sec.children[1]) != "and")
                throw PpddlParseError("expected (:goal (and ...))");
            const auto& conj = sec.children[1];
            for (std::size_t j = 1; j < conj.children.size(); ++j) {
                std::string pred = detail::single_pred(conj.children[j], ":goal");
                detail::check_declared(pred, declared, ":goal");
                p.goal.push_back(pred);
            }
            if (p.goal.empty()) throw PpddlParseError("empty goal clause");
            saw_goal = true;
        } else {
            throw PpddlParseError("unknown problem section '" + h + "'");
        }
    }
    if (!saw_goal) throw PpddlParseError("problem has no goal");
    if (p.domain_name != domain.name)
        throw PpddlParseError("problem references domain '" + p.domain_name + "'");
    return p;
}

// --- canonical emission ---------------------------------------------------

namespace detail {

inline std::string format_cost(double c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", c);
    return buf;
}

inline std::string format_probability(double p) {
    std::ostringstream os;
    os << p;
    return os.str();
}

inline std::string outcome_body(const EffectOutcome& o) {
    std::string s = "(and";
    for (const auto& a : sorted_predicates(o.add)) s += " (" + a + ")";
    for (const auto& d : sorted_predicates(o.del)) s += " (not (" + d + "))";
    s += " (decrease (reward) " + format_cost(o.cost) + "))";
    return s;
}

}  // namespace detail

inline std::string emit_ppddl(const PpddlDomain& d) {
    std::ostringstream os;
    os << "(define (domain " << d.name << ")\n";
    os << "    (:requirements :strips :probabilistic-effects :rewards)\n\n";
    os << "    (:predicates\n";
    for (const auto& p : sorted_predicates(d.predicates)) os << "        (" << p << ")\n";
    os << "    )\n";
    for (const auto& op : d.operators) {
        os << "\n    (:action " << op.name << "\n";
        os << "        :parameters ()\n";
        os << "        :precondition (and";
        for (const auto& p : sorted_predicates(op.precondition)) os << " (" << p << ")";
        os << ")\n";
        os << "        :effect ";
        if (op.outcomes.size() == 1) {
            os << detail::outcome_body(op.outcomes[0]);
        } else {
            os << "(probabilistic";
            for (const auto& o : op.outcomes) {
                if (o.add.empty() && o.del.empty() && o.cost == 0.0) continue;  // implicit no-op
                os << "\n            " << detail::format_probability(o.probability) << ' '
                   << detail::outcome_body(o);
            }
            os << ")";
        }
        os << "\n    )\n";
    }
    os << ")\n";
    return os.str();
}

inline std::string emit_ppddl(const PpddlProblem& p) {
    std::ostringstream os;
    os << "(define (problem " << p.name << ")\n";
    os << "    (:domain " << p.domain_name << ")\n\n";
    os << "    (:init";
    for (const auto& s : sorted_predicates(p.init)) os << " (" << s << ")";
    os << ")\n\n";
    os << "    (:goal (and";
    for (const auto& s : sorted_predicates(p.goal)) os << " (" << s << ")";
    os << "))\n";
    os << ")\n";
    return os.str();
}

}  // namespace dpa
