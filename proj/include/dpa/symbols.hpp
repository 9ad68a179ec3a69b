#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dpa/datasets.hpp"
#include "dpa/ml/kde.hpp"
#include "dpa/random.hpp"

namespace dpa {

// --- factors --------------------------------------------------------------

struct Factor {
    int id = 0;
    std::vector<int> vars;  // sorted state-variable indices
};

// Finest partition of the state variables consistent with every observed
// mask: variables that always change together share a factor; variables never
// masked stay as singleton residual factors.
inline std::vector<Factor> compute_factors(const std::vector<Mask>& masks, int dim) {
    std::vector<std::set<int>> membership(dim);  // which masks touch each var
    for (std::size_t m = 0; m < masks.size(); ++m)
        for (int v : masks[m])
            if (v >= 0 && v < dim) membership[v].insert(static_cast<int>(m));
    // same nonempty membership signature -> same factor; untouched vars are
    // each their own residual factor
    std::map<std::set<int>, std::vector<int>> groups;
    std::vector<Factor> out;
    for (int v = 0; v < dim; ++v) {
        if (membership[v].empty())
            out.push_back(Factor{0, {v}});
        else
            groups[membership[v]].push_back(v);
    }
    for (auto& [sig, vars] : groups) out.push_back(Factor{0, vars});
    std::sort(out.begin(), out.end(),
              [](const Factor& a, const Factor& b) { return a.vars[0] < b.vars[0]; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

inline std::vector<Factor> compute_factors(const std::vector<TransitionTuple>& td, int dim) {
    std::vector<Mask> masks;
    masks.reserve(td.size());
    for (const auto& t : td) masks.push_back(t.mask);
    return compute_factors(masks, dim);
}

// Factor ids whose variables intersect the mask. With sound factors each of
// these is fully contained in the mask.
inline std::vector<int> factors_in_mask(const std::vector<Factor>& factors, const Mask& mask) {
    std::set<int> mvars(mask.begin(), mask.end());
    std::vector<int> out;
    for (const auto& f : factors)
        if (std::any_of(f.vars.begin(), f.vars.end(), [&](int v) { return mvars.count(v); }))
            out.push_back(f.id);
    return out;
}

// --- symbols --------------------------------------------------------------

// A named boolean test over one factor, grounded by a kernel density: a state
// satisfies the symbol when the density at its factor projection is at least
// the threshold calibrated on the training samples.
struct Symbol {
    std::string name;
    int factor = 0;
    std::vector<int> vars;  // the factor's variables
    ml::DensityModel density;
    double log_threshold = 0.0;

    bool holds(const LowLevelState& normalized_state) const {
        std::vector<double> proj;
        proj.reserve(vars.size());
        for (int v : vars) proj.push_back(normalized_state[v]);
        return density.logpdf(proj) >= log_threshold;
    }
};

// Threshold at the given percentile of the density evaluated on its own
// mass: training points plus kernel-jittered draws, so zero-variance (flag)
// samples still yield a region wider than the exact peak.
inline double grounding_threshold(const ml::DensityModel& density, double percentile) {
    Rng rng(0xB10B);
    std::vector<double> lp;
    lp.reserve(density.samples().size() + 256);
    for (const auto& s : density.samples()) lp.push_back(density.logpdf(s));
    for (int i = 0; i < 256; ++i) lp.push_back(density.logpdf(density.sample(rng)));
    std::sort(lp.begin(), lp.end());
    std::size_t k = static_cast<std::size_t>(percentile * (lp.size() - 1));
    return lp[k];
}

inline Symbol make_symbol(int factor_id, const std::vector<int>& vars,
                          const std::vector<LowLevelState>& states, double percentile) {
    Symbol sym;
    sym.factor = factor_id;
    sym.vars = vars;
    sym.density = ml::fit_density(states, vars);
    sym.log_threshold = grounding_threshold(sym.density, percentile);
    return sym;
}

// --- symbol-subset scoring (§ shared by operator synthesis and targets) ----

using StateScorer = std::function<double(const LowLevelState&)>;
using BaseSampler = std::function<LowLevelState(Rng&)>;

// Fixed-state base; factors not pinned by a symbol keep that state's values.
inline BaseSampler fixed_base(LowLevelState base) {
    return [base = std::move(base)](Rng&) { return base; };
}

// Marginalizing base: each draw starts from a random reference state, so a
// subset only scores high when it pins down every factor the classifier
// cares about.
inline BaseSampler visited_base(const std::vector<LowLevelState>& visited) {
    return [&visited](Rng& rng) {
        return visited[uniform_int(rng, 0, static_cast<int>(visited.size()) - 1)];
    };
}

// Draw a full state: start from base, overwrite each subset symbol's factor
// variables with a density sample.
inline LowLevelState sample_joint_state(const std::vector<Symbol>& symbols,
                                        const std::vector<int>& subset,
                                        const LowLevelState& base, Rng& rng) {
    LowLevelState s = base;
    for (int id : subset) {
        const Symbol& sym = symbols[id];
        auto draw = sym.density.sample(rng);
        for (std::size_t i = 0; i < sym.vars.size(); ++i) s[sym.vars[i]] = draw[i];
    }
    return s;
}

inline double score_subset(const std::vector<Symbol>& symbols, const std::vector<int>& subset,
                           const StateScorer& scorer, const BaseSampler& base, int m, Rng& rng) {
    double total = 0;
    for (int i = 0; i < m; ++i)
        total += scorer(sample_joint_state(symbols, subset, base(rng), rng));
    return total / m;
}

inline double score_subset(const std::vector<Symbol>& symbols, const std::vector<int>& subset,
                           const StateScorer& scorer, const LowLevelState& base, int m,
                           Rng& rng) {
    return score_subset(symbols, subset, scorer, fixed_base(base), m, rng);
}

struct SubsetChoice {
    std::vector<int> symbol_ids;  // indices into the symbol table
    double score = -1.0;          // negative when no admissible subset exists
};

inline bool subset_name_less(const std::vector<Symbol>& symbols, const std::vector<int>& a,
                             const std::vector<int>& b) {
    std::vector<std::string> na, nb;
    for (int i : a) na.push_back(symbols[i].name);
    for (int i : b) nb.push_back(symbols[i].name);
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    return na < nb;
}

// Beam search over factor-disjoint symbol subsets. Subsets must contain
// exactly one symbol for every factor in `mandatory_factors`; remaining
// candidates are optional additions. Ties break toward fewer symbols, then
// lexicographic names.
inline SubsetChoice best_symbol_subset(const std::vector<Symbol>& symbols,
                                       const std::vector<int>& candidate_ids,
                                       const std::vector<int>& mandatory_factors,
                                       const StateScorer& scorer, const BaseSampler& base,
                                       int m, Rng& rng, int max_size = 5, int beam_width = 50) {
    std::map<int, std::vector<int>> by_factor;
    for (int id : candidate_ids) by_factor[symbols[id].factor].push_back(id);
    for (int f : mandatory_factors)
        if (!by_factor.count(f)) return {};  // uncoverable

    struct Entry {
        std::vector<int> ids;
        double score;
    };
    auto better = [&](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
        return subset_name_less(symbols, a.ids, b.ids);
    };
    auto rescore = [&](std::vector<int> ids) {
        double s = score_subset(symbols, ids, scorer, base, m, rng);
        return Entry{std::move(ids), s};
    };

    std::vector<Entry> beam{Entry{{}, -1.0}};
    // cover mandatory factors first
    for (int f : mandatory_factors) {
        std::vector<Entry> next;
        for (const auto& e : beam)
            for (int id : by_factor[f]) {
                auto ids = e.ids;
                ids.push_back(id);
                next.push_back(rescore(std::move(ids)));
            }
        std::sort(next.begin(), next.end(), better);
        if (static_cast<int>(next.size()) > beam_width) next.resize(beam_width);
        beam = std::move(next);
    }

    SubsetChoice best;
    auto consider = [&](const Entry& e) {
        if (static_cast<int>(e.ids.size()) > max_size) return;
        if (e.score > best.score ||
            (e.score == best.score &&
             (e.ids.size() < best.symbol_ids.size() ||
              (e.ids.size() == best.symbol_ids.size() &&
               subset_name_less(symbols, e.ids, best.symbol_ids)))))
            best = SubsetChoice{e.ids, e.score};
    };
    if (!mandatory_factors.empty() || !beam.empty())
        for (const auto& e : beam)
            if (!e.ids.empty() || mandatory_factors.empty()) consider(e);

    // optional extensions over the remaining factors
    std::set<int> mandatory(mandatory_factors.begin(), mandatory_factors.end());
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Entry> next;
        for (const auto& e : beam) {
            if (static_cast<int>(e.ids.size()) >= max_size) continue;
            std::set<int> used;
            for (int id : e.ids) used.insert(symbols[id].factor);
            for (const auto& [f, ids] : by_factor) {
                if (used.count(f)) continue;
                for (int id : ids) {
                    auto ext = e.ids;
                    ext.push_back(id);
                    next.push_back(rescore(std::move(ext)));
                }
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end(), better);
        if (static_cast<int>(next.size()) > beam_width) next.resize(beam_width);
        for (const auto& e : next) {
            if (e.ids.empty()) continue;
            if (e.score > best.score + 1e-9) grew = true;
            consider(e);
        }
        beam = std::move(next);
    }
    return best;
}

// --- normalization --------------------------------------------------------

inline LowLevelState normalize_state(const LowLevelState& s, const std::vector<double>& scales) {
    LowLevelState out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = scales[i] > 0 ? s[i] / scales[i] : s[i];
    return out;
}

inline LowLevelState denormalize_state(const LowLevelState& s,
                                       const std::vector<double>& scales) {
    LowLevelState out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = scales[i] > 0 ? s[i] * scales[i] : s[i];
    return out;
}

}  // namespace dpa
