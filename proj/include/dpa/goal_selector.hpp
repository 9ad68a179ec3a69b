#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpa/abstraction.hpp"
#include "dpa/ml/svm.hpp"
#include "dpa/symbols.hpp"

namespace dpa {

enum class Strategy { ActionBabbling, GoalBabbling, DistanceGoalBabbling };

inline std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::ActionBabbling: return "ab";
        case Strategy::GoalBabbling: return "gb";
        case Strategy::DistanceGoalBabbling: return "dgb";
    }
    return "?";
}

inline std::optional<Strategy> strategy_from_string(const std::string& s) {
    if (s == "ab") return Strategy::ActionBabbling;
    if (s == "gb") return Strategy::GoalBabbling;
    if (s == "dgb") return Strategy::DistanceGoalBabbling;
    return std::nullopt;
}

inline constexpr double kCuriosityNoiseSigma = 0.05;  // per dimension, normalized space

// η(s) = ||s_init − s + Z||; larger means farther from the start under noise.
inline double curiosity(const LowLevelState& s, const LowLevelState& s_init,
                        const std::vector<double>& noise) {
    double acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d = s_init[i] - s[i] + noise[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// Target selection over visited (normalized) states. Action Babbling opts out
// of directed exploration entirely; Goal Babbling picks a uniform visited
// state; the distance-based variant maximizes noisy distance from the start.
inline std::optional<LowLevelState> select_target(Strategy strategy,
                                                  const std::vector<LowLevelState>& visited,
                                                  const LowLevelState& s_init, Rng& rng) {
    if (strategy == Strategy::ActionBabbling) return std::nullopt;
    if (visited.empty()) return std::nullopt;
    if (strategy == Strategy::GoalBabbling)
        return visited[uniform_int(rng, 0, static_cast<int>(visited.size()) - 1)];
    double best = -1;
    std::size_t best_i = 0;
    std::vector<double> noise(s_init.size());
    for (std::size_t i = 0; i < visited.size(); ++i) {
        for (auto& z : noise) z = gaussian(rng, 0.0, kCuriosityNoiseSigma);
        double eta = curiosity(visited[i], s_init, noise);
        if (eta > best) {
            best = eta;
            best_i = i;
        }
    }
    return visited[best_i];
}

struct SymbolConjunction {
    std::vector<std::string> symbols;  // factor-disjoint by construction
    double score = 0.0;
};

struct TargetTranslationConfig {
    double eps_nbr = 0.05;
    int min_positives = 20;
    int score_samples = 100;
    int max_symbols = 5;
    int beam = 50;
    std::size_t svm_cap = 300;
};

// §"state to symbols": learn a local classifier around the target and find
// the factor-disjoint symbol conjunction whose joint samples it most accepts.
inline SymbolConjunction state_to_symbols(const LowLevelState& s_target,
                                          const std::vector<LowLevelState>& visited,
                                          const std::vector<Symbol>& symbols,
                                          const std::vector<Factor>& factors, Rng& rng,
                                          const TargetTranslationConfig& cfg = {}) {
    if (symbols.empty() || visited.empty()) return {};

    auto dist2 = [](const LowLevelState& a, const LowLevelState& b) {
        double d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
        return d;
    };
    std::vector<LowLevelState> pos, neg;
    double eps = cfg.eps_nbr;
    while (true) {
        pos.clear();
        neg.clear();
        for (const auto& v : visited)
            (dist2(v, s_target) <= eps * eps ? pos : neg).push_back(v);
        if (static_cast<int>(pos.size()) >= cfg.min_positives || neg.empty()) break;
        eps *= 2;
    }
    auto cl = ml::ProbabilisticClassifier::train(ml::subsample(pos, cfg.svm_cap, rng),
                                                 ml::subsample(neg, cfg.svm_cap, rng),
                                                 derive_seed(0x7A6, uniform_int(rng, 0, 1 << 20)));

    std::vector<int> candidates;
    for (std::size_t si = 0; si < symbols.size(); ++si)
        if (cl.is_constant() ||
            classifier_sensitive_to(cl, factors[symbols[si].factor], s_target, visited, rng))
            candidates.push_back(static_cast<int>(si));
    if (candidates.empty()) return {};

    StateScorer scorer = [&](const LowLevelState& s) { return cl.classify(s); };
    SubsetChoice choice = best_symbol_subset(symbols, candidates, {}, scorer,
                                             visited_base(visited), cfg.score_samples, rng,
                                             cfg.max_symbols, cfg.beam);
    SymbolConjunction out;
    if (choice.score < 0) return out;
    for (int id : choice.symbol_ids) out.symbols.push_back(symbols[id].name);
    std::sort(out.symbols.begin(), out.symbols.end(), predicate_less);
    out.score = choice.score;
    return out;
}

// Exact translation for a known target state: per factor, the symbol whose
// grounding contains the target's projection. Classifier-based translation
// degenerates when the target lies outside the visited set, so the game goal
// is anchored directly. Symbols some operator can re-achieve rank first
// (anything merely true at the start is deleted for good once the factor
// moves), then symbols true at the start, then the rest; ties break on the
// density at the target.
inline std::vector<SymbolConjunction> anchored_conjunctions(
    const LowLevelState& s_target, const std::vector<Symbol>& symbols,
    const std::vector<Factor>& factors, const std::set<std::string>& addable,
    const std::set<std::string>& init_true, int per_factor = 4, int max_combos = 16) {
    std::vector<std::vector<std::string>> ranked;  // per covered factor
    for (const Factor& f : factors) {
        std::vector<std::tuple<int, double, std::string>> cands;  // rank, logpdf, name
        for (const Symbol& sym : symbols) {
            if (sym.factor != f.id || !sym.holds(s_target)) continue;
            std::vector<double> proj;
            proj.reserve(sym.vars.size());
            for (int v : sym.vars) proj.push_back(s_target[v]);
            double lp = sym.density.logpdf(proj);
            int rank = addable.count(sym.name) ? 2 : init_true.count(sym.name) ? 1 : 0;
            cands.emplace_back(rank, lp, sym.name);
        }
        if (cands.empty()) continue;  // factor left free
        std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
            if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
            return std::get<2>(a) < std::get<2>(b);
        });
        if (static_cast<int>(cands.size()) > per_factor) cands.resize(per_factor);
        std::vector<std::string> names;
        for (const auto& [r, lp, nm] : cands) names.push_back(nm);
        ranked.push_back(std::move(names));
    }
    if (ranked.empty()) return {};

    // enumerate combinations in order of total preference regret (the sum of
    // per-factor indices), so the all-best conjunction comes first
    struct Combo {
        std::vector<std::size_t> at;
        std::size_t regret;
    };
    std::vector<Combo> combos;
    std::vector<std::size_t> at(ranked.size(), 0);
    while (true) {
        std::size_t regret = 0;
        for (auto i : at) regret += i;
        combos.push_back({at, regret});
        std::size_t k = 0;
        for (; k < at.size(); ++k) {
            if (++at[k] < ranked[k].size()) break;
            at[k] = 0;
        }
        if (k == at.size()) break;
        if (combos.size() >= 4096) break;  // safety; per_factor bounds this anyway
    }
    std::stable_sort(combos.begin(), combos.end(),
                     [](const Combo& a, const Combo& b) { return a.regret < b.regret; });
    if (static_cast<int>(combos.size()) > max_combos) combos.resize(max_combos);

    std::vector<SymbolConjunction> out;
    for (const Combo& c : combos) {
        SymbolConjunction conj;
        for (std::size_t k = 0; k < ranked.size(); ++k)
            conj.symbols.push_back(ranked[k][c.at[k]]);
        std::sort(conj.symbols.begin(), conj.symbols.end(), predicate_less);
        conj.score = 1.0;
        out.push_back(std::move(conj));
    }
    return out;
}

inline SymbolConjunction anchored_conjunction(const LowLevelState& s_target,
                                              const std::vector<Symbol>& symbols,
                                              const std::vector<Factor>& factors,
                                              const std::set<std::string>& addable,
                                              const std::set<std::string>& init_true) {
    auto all = anchored_conjunctions(s_target, symbols, factors, addable, init_true, 1, 1);
    return all.empty() ? SymbolConjunction{} : all.front();
}

}  // namespace dpa
