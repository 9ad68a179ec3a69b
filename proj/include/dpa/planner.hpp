#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpa/ppddl.hpp"

namespace dpa {

// Forward uniform-cost search over symbol sets. Probabilistic operators are
// determinized all-outcomes style: every outcome becomes its own deterministic
// action, with the cost inflated by the inverse of the outcome's probability
// so unlikely results are penalized but still plannable.

using SymbolSet = std::vector<std::uint64_t>;  // bitset over predicate indices

struct SymbolIndex {
    std::map<std::string, int> by_name;
    std::vector<std::string> names;

    explicit SymbolIndex(const PpddlDomain& d) {
        for (const auto& p : sorted_predicates(d.predicates)) {
            by_name.emplace(p, static_cast<int>(names.size()));
            names.push_back(p);
        }
    }

    int words() const { return static_cast<int>((names.size() + 63) / 64); }

    SymbolSet make(const std::vector<std::string>& preds) const {
        SymbolSet s(words(), 0);
        for (const auto& p : preds) {
            auto it = by_name.find(p);
            if (it == by_name.end()) throw PpddlParseError("unknown predicate " + p);
            s[it->second / 64] |= std::uint64_t{1} << (it->second % 64);
        }
        return s;
    }
};

inline bool subset_of(const SymbolSet& sub, const SymbolSet& super) {
    for (std::size_t w = 0; w < sub.size(); ++w)
        if (sub[w] & ~super[w]) return false;
    return true;
}

struct DeterminizedOp {
    std::string name;
    SymbolSet pre, add, del;
    double cost = 1.0;
};

struct SymbolSetHash {
    std::size_t operator()(const SymbolSet& s) const {
        std::size_t h = 1469598103934665603ull;
        for (auto w : s) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline SymbolSet apply_op(const SymbolSet& s, const DeterminizedOp& op) {
    SymbolSet r = s;
    for (std::size_t w = 0; w < r.size(); ++w) r[w] = (r[w] & ~op.del[w]) | op.add[w];
    return r;
}

inline std::vector<DeterminizedOp> determinize(const PpddlDomain& d, const SymbolIndex& idx) {
    std::vector<DeterminizedOp> ops;
    for (const auto& op : d.operators) {
        SymbolSet pre = idx.make(op.precondition);
        for (const auto& o : op.outcomes) {
            if (o.add.empty() && o.del.empty()) continue;  // no-op outcome
            DeterminizedOp det;
            det.name = op.name;
            det.pre = pre;
            det.add = idx.make(o.add);
            det.del = idx.make(o.del);
            double p = std::max(o.probability, 1e-6);
            det.cost = std::max(o.cost, 1e-3) / p;
            ops.push_back(std::move(det));
        }
    }
    std::stable_sort(ops.begin(), ops.end(),
                     [](const DeterminizedOp& a, const DeterminizedOp& b) {
                         return a.name < b.name;
                     });
    return ops;
}

struct Plan {
    std::vector<std::string> steps;
    double cost = 0.0;
};

// Uniform-cost search; ties broken by expansion order, with operators applied
// in lexicographic name order so results are deterministic.
inline std::optional<Plan> plan(const PpddlDomain& domain, const PpddlProblem& problem,
                                std::size_t max_expansions = 2'000'000) {
    SymbolIndex idx(domain);
    auto ops = determinize(domain, idx);
    SymbolSet init = idx.make(problem.init);
    SymbolSet goal = idx.make(problem.goal);
    if (subset_of(goal, init)) return Plan{};

    struct NodeInfo {
        double cost;
        int parent = -1;   // index into `order`
        int via_op = -1;
    };
    std::unordered_map<SymbolSet, NodeInfo, SymbolSetHash> best;
    std::vector<SymbolSet> order;  // states in settle order, for path recovery

    using QEntry = std::tuple<double, std::uint64_t, SymbolSet, int, int>;  // cost, seq, s, parent, op
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> frontier;
    std::uint64_t seq = 0;
    frontier.emplace(0.0, seq++, init, -1, -1);

    std::size_t expansions = 0;
    while (!frontier.empty()) {
        auto [cost, _, s, parent, via] = frontier.top();
        frontier.pop();
        if (best.count(s)) continue;
        best.emplace(s, NodeInfo{cost, parent, via});
        order.push_back(s);
        int my_index = static_cast<int>(order.size()) - 1;

        if (subset_of(goal, s)) {
            Plan p;
            p.cost = cost;
            int at = my_index;
            while (at >= 0) {
                const NodeInfo& info = best.at(order[at]);
                if (info.via_op >= 0) p.steps.push_back(ops[info.via_op].name);
                at = info.parent;
            }
            std::reverse(p.steps.begin(), p.steps.end());
            return p;
        }
        if (++expansions > max_expansions) return std::nullopt;

        for (int oi = 0; oi < static_cast<int>(ops.size()); ++oi) {
            const auto& op = ops[oi];
            if (!subset_of(op.pre, s)) continue;
            SymbolSet next = apply_op(s, op);
            if (best.count(next)) continue;
            frontier.emplace(cost + op.cost, seq++, std::move(next), my_index, oi);
        }
    }
    return std::nullopt;
}

// Synthesized operators are named option-<i>-partition-<j>-<k>; the leading
// index recovers which low-level option the step grounds to.
inline std::optional<int> operator_option_index(const std::string& op_name) {
    if (!op_name.starts_with("option-")) return std::nullopt;
    std::size_t end = op_name.find('-', 7);
    if (end == std::string::npos) return std::nullopt;
    try {
        return std::stoi(op_name.substr(7, end - 7));
    } catch (...) {
        return std::nullopt;
    }
}

}  // namespace dpa
