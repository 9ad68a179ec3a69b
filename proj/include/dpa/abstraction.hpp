#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpa/datasets.hpp"
#include "dpa/ml/dbscan.hpp"
#include "dpa/ml/svm.hpp"
#include "dpa/ppddl.hpp"
#include "dpa/symbols.hpp"

namespace dpa {

// Four-step skills-to-symbols pipeline: partition option executions by
// effect, learn initiation-set classifiers, distill effect densities into a
// symbol vocabulary, and synthesize a propositional PPDDL domain. Re-run from
// scratch on the full datasets every cycle.

struct AbstractionConfig {
    double dbscan_eps = 0.1;
    int dbscan_min_pts = 2;
    double merge_overlap_frac = 0.10;  // share of A's starts claimed by B's classifier
    double dedup_disagreement = 0.15;  // mean grounding disagreement below -> same symbol
    int dedup_samples = 100;
    double grounding_percentile = 0.05;
    std::size_t svm_pos_cap = 200;
    std::size_t svm_neg_cap = 200;
    int score_samples = 25;      // Monte-Carlo draws per candidate subset
    int score_beam = 5;
    int score_max_symbols = 5;
    double min_operator_score = 0.05;
    double precondition_threshold = 0.6;  // keep conjunctions scoring at least this
    int per_factor_symbols = 8;           // shortlist size per precondition factor
    int max_ops_per_partition = 32;
    std::uint64_t seed = 0;
};

struct EffectCluster {
    std::vector<int> td;  // indices into the TD vector
    double probability = 1.0;
};

struct Partition {
    Option option;
    Mask mask;
    std::vector<EffectCluster> outcomes;
    std::vector<int> all_td;
    ml::ProbabilisticClassifier precondition;
};

namespace detail {

inline std::string mask_key(const Mask& m) {
    std::string k;
    for (int v : m) k += std::to_string(v) + ",";
    return k;
}

}  // namespace detail

// Step 1a: group TD by (option, mask) and split each group by clustering the
// full normalized end states, so unchanged context (floor, levers, carried
// items) separates executions with look-alike masked effects. A group that is
// entirely noise collapses into one catch-all partition.
inline std::vector<Partition> partition_transitions(
    const std::vector<TransitionTuple>& td, const std::vector<LowLevelState>& norm_s_prime,
    const AbstractionConfig& cfg, std::vector<std::string>* warnings = nullptr) {
    std::map<std::pair<std::string, std::string>, std::vector<int>> groups;
    for (std::size_t i = 0; i < td.size(); ++i)
        groups[{td[i].option.token(), detail::mask_key(td[i].mask)}].push_back(
            static_cast<int>(i));

    std::vector<Partition> out;
    for (const auto& [key, idx] : groups) {
        std::vector<std::vector<double>> pts;
        pts.reserve(idx.size());
        for (int i : idx) pts.push_back(norm_s_prime[i]);
        auto labels = ml::dbscan(pts, cfg.dbscan_eps, cfg.dbscan_min_pts);

        std::map<int, std::vector<int>> clusters;
        for (std::size_t j = 0; j < idx.size(); ++j)
            if (labels[j] >= 0) clusters[labels[j]].push_back(idx[j]);
        if (clusters.empty()) {
            if (warnings)
                warnings->push_back("all-noise group " + key.first + " -> catch-all partition");
            clusters[0] = idx;  // catch-all
        }
        for (auto& [label, members] : clusters) {
            Partition p;
            p.option = td[members[0]].option;
            p.mask = td[members[0]].mask;
            p.outcomes.push_back(EffectCluster{members, 1.0});
            p.all_td = members;
            out.push_back(std::move(p));
        }
    }
    return out;
}

namespace detail {

inline std::vector<LowLevelState> gather(const std::vector<int>& idx,
                                         const std::vector<LowLevelState>& pool) {
    std::vector<LowLevelState> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(pool[i]);
    return out;
}

// Cheap reject before the classifier-based overlap test: bounding boxes of
// the two start sets must come within `slack` on every dimension.
inline bool boxes_touch(const std::vector<LowLevelState>& a, const std::vector<LowLevelState>& b,
                        double slack) {
    for (std::size_t d = 0; d < a[0].size(); ++d) {
        double alo = a[0][d], ahi = a[0][d], blo = b[0][d], bhi = b[0][d];
        for (const auto& s : a) alo = std::min(alo, s[d]), ahi = std::max(ahi, s[d]);
        for (const auto& s : b) blo = std::min(blo, s[d]), bhi = std::max(bhi, s[d]);
        if (alo > bhi + slack || blo > ahi + slack) return false;
    }
    return true;
}

}  // namespace detail

// Step 1b: merge candidates of the same (option, mask) whose initiation sets
// overlap. Overlap test: a classifier trained on B's starts against A's
// claims at least `merge_overlap_frac` of A's starts.
inline std::vector<Partition> merge_partitions(std::vector<Partition> parts,
                                               const std::vector<LowLevelState>& norm_s,
                                               const AbstractionConfig& cfg) {
    const int n = static_cast<int>(parts.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    auto overlaps = [&](const Partition& a, const Partition& b, std::uint64_t pair_seed) {
        auto sa = detail::gather(a.all_td, norm_s);
        auto sb = detail::gather(b.all_td, norm_s);
        if (!detail::boxes_touch(sa, sb, cfg.dbscan_eps)) return false;
        Rng rng(derive_seed(cfg.seed, pair_seed));
        auto cl = ml::ProbabilisticClassifier::train(ml::subsample(sb, cfg.svm_pos_cap, rng),
                                                     ml::subsample(sa, cfg.svm_neg_cap, rng),
                                                     derive_seed(cfg.seed, pair_seed + 1));
        int claimed = 0;
        for (const auto& s : sa) claimed += cl.classify(s) > 0.5;
        return claimed >= cfg.merge_overlap_frac * static_cast<double>(sa.size());
    };

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (parts[i].option != parts[j].option ||
                detail::mask_key(parts[i].mask) != detail::mask_key(parts[j].mask))
                continue;
            if (find(i) == find(j)) continue;
            std::uint64_t ps = 0x9e37u + static_cast<std::uint64_t>(i) * 2654435761u + j * 2;
            if (overlaps(parts[i], parts[j], ps) || overlaps(parts[j], parts[i], ps + 1))
                parent[find(i)] = find(j);
        }

    std::map<int, Partition> merged;
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        auto it = merged.find(r);
        if (it == merged.end()) {
            merged.emplace(r, std::move(parts[i]));
        } else {
            Partition& m = it->second;
            for (auto& o : parts[i].outcomes) m.outcomes.push_back(std::move(o));
            m.all_td.insert(m.all_td.end(), parts[i].all_td.begin(), parts[i].all_td.end());
        }
    }
    std::vector<Partition> out;
    for (auto& [r, p] : merged) {
        double total = static_cast<double>(p.all_td.size());
        for (auto& o : p.outcomes) o.probability = static_cast<double>(o.td.size()) / total;
        std::sort(p.all_td.begin(), p.all_td.end());
        out.push_back(std::move(p));
    }
    // canonical order: by option token, then first transition index
    std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
        if (a.option != b.option) return a.option < b.option;
        return a.all_td.front() < b.all_td.front();
    });
    return out;
}

// Step 2: initiation-set classifier per partition. Negatives are states where
// the option was infeasible plus the start states of the option's sibling
// partitions; with no negatives the classifier degenerates to constant-true.
// A factor stays in the classifier's view only if permuting its variables
// within the training pool flips predictions: factors that were near-constant
// during collection (a treasure that never moved) otherwise make the RBF
// kernel extrapolate and veto states it has no evidence against.
inline void learn_preconditions(std::vector<Partition>& parts,
                                const std::vector<InitiationTuple>& id,
                                const std::vector<LowLevelState>& norm_id_s,
                                const std::vector<LowLevelState>& norm_s,
                                const std::vector<Factor>& factors,
                                const AbstractionConfig& cfg) {
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        Partition& p = parts[pi];
        std::vector<LowLevelState> pos = detail::gather(p.all_td, norm_s);
        std::vector<LowLevelState> neg;
        for (std::size_t i = 0; i < id.size(); ++i)
            if (id[i].option == p.option && !id[i].feasible) neg.push_back(norm_id_s[i]);
        for (const Partition& sib : parts) {
            if (&sib == &p || sib.option != p.option) continue;
            for (int i : sib.all_td) neg.push_back(norm_s[i]);
        }
        Rng rng(derive_seed(cfg.seed, 0xC0DE + pi));
        pos = ml::subsample(pos, cfg.svm_pos_cap, rng);
        neg = ml::subsample(neg, cfg.svm_neg_cap, rng);
        auto full = ml::ProbabilisticClassifier::train(pos, neg,
                                                       derive_seed(cfg.seed, 0xF00D + pi));
        if (full.is_constant()) {
            p.precondition = full;
            continue;
        }

        std::vector<LowLevelState> pool = pos;
        pool.insert(pool.end(), neg.begin(), neg.end());
        std::vector<int> kept_dims;
        for (const Factor& f : factors) {
            int flips = 0, total = 0;
            for (const auto& s : pool) {
                const auto& donor =
                    pool[uniform_int(rng, 0, static_cast<int>(pool.size()) - 1)];
                LowLevelState scrambled = s;
                for (int v : f.vars) scrambled[v] = donor[v];
                flips += (full.classify(s) > 0.5) != (full.classify(scrambled) > 0.5);
                ++total;
            }
            if (static_cast<double>(flips) / total >= 0.02)
                for (int v : f.vars) kept_dims.push_back(v);
        }
        if (kept_dims.empty() || kept_dims.size() == pool[0].size()) {
            p.precondition = std::move(full);
        } else {
            std::sort(kept_dims.begin(), kept_dims.end());
            p.precondition = ml::ProbabilisticClassifier::train(
                pos, neg, derive_seed(cfg.seed, 0xF00D + pi), 10.0, kept_dims);
        }
    }
}

// Step 3: one candidate symbol per (outcome cluster, masked factor), fit on
// the cluster's end states, plus one per (partition, masked factor) fit on
// the start states so initiation regions stay expressible; everything is
// deduplicated by grounding agreement.
struct SymbolTable {
    std::vector<Symbol> symbols;
    // (partition, outcome, factor) -> symbol index
    std::map<std::tuple<int, int, int>, int> effect_symbol;
    // (partition, factor) -> symbol index over the start states
    std::map<std::pair<int, int>, int> start_symbol;
};

inline SymbolTable generate_symbols(const std::vector<Partition>& parts,
                                    const std::vector<Factor>& factors,
                                    const std::vector<LowLevelState>& norm_s,
                                    const std::vector<LowLevelState>& norm_s_prime,
                                    const AbstractionConfig& cfg) {
    SymbolTable table;
    Rng rng(derive_seed(cfg.seed, 0x51B0));
    auto equivalent = [&](const Symbol& a, const Symbol& b) {
        if (a.factor != b.factor) return false;
        int disagree = 0, total = 0;
        auto test = [&](const std::vector<double>& proj) {
            bool ha = a.density.logpdf(proj) >= a.log_threshold;
            bool hb = b.density.logpdf(proj) >= b.log_threshold;
            disagree += ha != hb;
            ++total;
        };
        for (int i = 0; i < cfg.dedup_samples; ++i) test(a.density.sample(rng));
        for (int i = 0; i < cfg.dedup_samples; ++i) test(b.density.sample(rng));
        return static_cast<double>(disagree) / total < cfg.dedup_disagreement;
    };

    auto intern = [&](Symbol cand) {
        for (std::size_t si = 0; si < table.symbols.size(); ++si)
            if (equivalent(table.symbols[si], cand)) return static_cast<int>(si);
        cand.name = "symbol_" + std::to_string(table.symbols.size());
        table.symbols.push_back(std::move(cand));
        return static_cast<int>(table.symbols.size()) - 1;
    };

    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        auto masked = factors_in_mask(factors, parts[pi].mask);
        for (std::size_t oi = 0; oi < parts[pi].outcomes.size(); ++oi) {
            auto ends = detail::gather(parts[pi].outcomes[oi].td, norm_s_prime);
            for (int f : masked)
                table.effect_symbol[{static_cast<int>(pi), static_cast<int>(oi), f}] = intern(
                    make_symbol(f, factors[f].vars, ends, cfg.grounding_percentile));
        }
        auto starts = detail::gather(parts[pi].all_td, norm_s);
        for (int f : masked)
            table.start_symbol[{static_cast<int>(pi), f}] =
                intern(make_symbol(f, factors[f].vars, starts, cfg.grounding_percentile));
    }
    return table;
}

// Which factors the classifier reacts to: resample the factor's variables
// among visited values around a base state and watch the output variance.
inline bool classifier_sensitive_to(const ml::ProbabilisticClassifier& cl,
                                    const Factor& factor, const LowLevelState& base,
                                    const std::vector<LowLevelState>& visited, Rng& rng,
                                    int probes = 16, double var_threshold = 1e-3) {
    if (cl.is_constant() || visited.empty()) return false;
    std::vector<double> outs;
    for (int i = 0; i < probes; ++i) {
        const auto& donor = visited[uniform_int(rng, 0, static_cast<int>(visited.size()) - 1)];
        LowLevelState probe = base;
        for (int v : factor.vars) probe[v] = donor[v];
        outs.push_back(cl.classify(probe));
    }
    double mean = std::accumulate(outs.begin(), outs.end(), 0.0) / outs.size();
    double var = 0;
    for (double o : outs) var += (o - mean) * (o - mean);
    return var / outs.size() > var_threshold;
}

// Step 4: operators are instantiated per (partition, entailing conjunction).
// For every factor the option moves or its classifier reacts to, candidate
// symbols are shortlisted by marginal acceptance; every combination of one
// symbol per factor whose joint samples the classifier accepts becomes its
// own operator. Effects add the outcome symbols and delete the covering
// precondition symbols (Fig-7 "(symbol_6) (not (symbol_5))" shape). Keeping
// preconditions inside the shared symbol vocabulary is what lets operators
// chain: one operator's effect grounds the next one's precondition.
struct Abstraction {
    std::vector<double> scales;
    std::vector<Factor> factors;
    std::vector<Partition> partitions;
    std::vector<Symbol> symbols;
    std::vector<Option> options;  // sorted; operator names index into this
    PpddlDomain domain;
    std::vector<std::string> warnings;
};

inline PpddlDomain synthesize_domain(const std::vector<Partition>& parts,
                                     const SymbolTable& table,
                                     const std::vector<Factor>& factors,
                                     const std::vector<TransitionTuple>& td,
                                     const std::vector<LowLevelState>& norm_s,
                                     const std::vector<Option>& options_sorted,
                                     const AbstractionConfig& cfg,
                                     std::vector<std::string>* warnings = nullptr) {
    PpddlDomain d;
    d.name = "treasure-game";
    d.predicates.push_back("notfailed");
    for (const auto& s : table.symbols) d.predicates.push_back(s.name);

    std::map<Option, int> option_index;
    for (std::size_t i = 0; i < options_sorted.size(); ++i)
        option_index[options_sorted[i]] = static_cast<int>(i);
    std::map<Option, int> partition_counter;
    int global_counter = 0;

    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const Partition& p = parts[pi];
        int oi = option_index.at(p.option);
        int pj = partition_counter[p.option]++;

        auto masked_factors = factors_in_mask(factors, p.mask);
        Rng rng(derive_seed(cfg.seed, 0xAC7 + pi));

        // base state for joint sampling: mean of the partition's start states
        LowLevelState base(norm_s[p.all_td[0]].size(), 0.0);
        for (int i : p.all_td)
            for (std::size_t dix = 0; dix < base.size(); ++dix) base[dix] += norm_s[i][dix];
        for (auto& v : base) v /= static_cast<double>(p.all_td.size());

        // factors the precondition must pin: everything the option moves plus
        // everything its classifier reacts to
        std::vector<int> wanted(masked_factors.begin(), masked_factors.end());
        for (const auto& f : factors) {
            if (std::find(wanted.begin(), wanted.end(), f.id) != wanted.end()) continue;
            if (classifier_sensitive_to(p.precondition, f, base, norm_s, rng))
                wanted.push_back(f.id);
        }

        StateScorer scorer = [&](const LowLevelState& s) { return p.precondition.classify(s); };
        BaseSampler sampler = visited_base(norm_s);

        // shortlist per factor by marginal acceptance under the classifier
        bool uncoverable = false;
        std::vector<std::vector<int>> shortlist;
        for (int f : wanted) {
            std::vector<std::pair<double, int>> scored;
            for (std::size_t si = 0; si < table.symbols.size(); ++si)
                if (table.symbols[si].factor == f)
                    scored.emplace_back(score_subset(table.symbols, {static_cast<int>(si)},
                                                     scorer, sampler, cfg.score_samples, rng),
                                        static_cast<int>(si));
            std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return table.symbols[a.second].name < table.symbols[b.second].name;
            });
            if (static_cast<int>(scored.size()) > cfg.per_factor_symbols)
                scored.resize(cfg.per_factor_symbols);
            if (scored.empty()) {
                if (std::find(masked_factors.begin(), masked_factors.end(), f) !=
                    masked_factors.end())
                    uncoverable = true;
                continue;  // sensitive factor with no vocabulary: leave it free
            }
            std::vector<int> ids;
            for (const auto& [sc, si] : scored) ids.push_back(si);
            shortlist.push_back(std::move(ids));
        }
        if (uncoverable || shortlist.empty()) {
            if (warnings)
                warnings->push_back("partition " + p.option.token() + "/" + std::to_string(pj) +
                                    ": no precondition subset matched, operator omitted");
            continue;
        }

        // every combination of one symbol per factor that the classifier
        // accepts becomes an operator
        struct Combo {
            std::vector<int> ids;
            double score;
        };
        std::vector<Combo> kept;
        Combo best{{}, -1.0};
        std::vector<std::size_t> at(shortlist.size(), 0);
        while (true) {
            std::vector<int> ids;
            for (std::size_t k = 0; k < shortlist.size(); ++k)
                ids.push_back(shortlist[k][at[k]]);
            double sc = score_subset(table.symbols, ids, scorer, sampler, cfg.score_samples,
                                     rng);
            if (sc >= cfg.precondition_threshold) kept.push_back({ids, sc});
            if (sc > best.score) best = {std::move(ids), sc};
            std::size_t k = 0;
            for (; k < at.size(); ++k) {
                if (++at[k] < shortlist[k].size()) break;
                at[k] = 0;
            }
            if (k == at.size()) break;
        }
        if (kept.empty() && best.score >= cfg.min_operator_score) kept.push_back(best);
        if (kept.empty()) {
            if (warnings)
                warnings->push_back("partition " + p.option.token() + "/" + std::to_string(pj) +
                                    ": no precondition subset matched, operator omitted");
            continue;
        }
        std::stable_sort(kept.begin(), kept.end(), [&](const Combo& a, const Combo& b) {
            if (a.score != b.score) return a.score > b.score;
            return subset_name_less(table.symbols, a.ids, b.ids);
        });
        if (static_cast<int>(kept.size()) > cfg.max_ops_per_partition)
            kept.resize(cfg.max_ops_per_partition);

        for (const Combo& combo : kept) {
            PpddlOperator op;
            op.name = "option-" + std::to_string(oi) + "-partition-" + std::to_string(pj) +
                      "-" + std::to_string(global_counter++);
            op.precondition.push_back("notfailed");
            std::map<int, int> pre_by_factor;  // factor -> chosen symbol
            for (int sid : combo.ids) {
                op.precondition.push_back(table.symbols[sid].name);
                pre_by_factor[table.symbols[sid].factor] = sid;
            }

            for (std::size_t ci = 0; ci < p.outcomes.size(); ++ci) {
                const auto& cluster = p.outcomes[ci];
                EffectOutcome eff;
                eff.probability = cluster.probability;
                std::set<int> added;
                for (int f : masked_factors) {
                    auto it = table.effect_symbol.find(
                        {static_cast<int>(pi), static_cast<int>(ci), f});
                    if (it == table.effect_symbol.end()) continue;
                    eff.add.push_back(table.symbols[it->second].name);
                    added.insert(it->second);
                }
                // delete every sibling symbol of the changed factors, not just
                // the covering precondition: overlapping symbols can all hold
                // at once in a grounded init, and leaving a stale sibling true
                // after the factor moved would hand the planner free shortcuts
                for (int f : masked_factors) {
                    for (std::size_t si = 0; si < table.symbols.size(); ++si)
                        if (table.symbols[si].factor == f && !added.count(static_cast<int>(si)))
                            eff.del.push_back(table.symbols[si].name);
                }
                double steps = 0;
                for (int i : cluster.td) steps += -td[i].r;
                // divide by the precondition score: a combo the classifier
                // only half-accepts is a coin flip at execution time, so the
                // planner should prefer chains through confident operators
                eff.cost = std::max(1.0, steps / static_cast<double>(cluster.td.size())) /
                           std::max(combo.score, 0.1);
                op.outcomes.push_back(std::move(eff));
            }
            d.operators.push_back(std::move(op));
        }
    }
    return d;
}

inline Abstraction build_abstraction(const std::vector<TransitionTuple>& td,
                                     const std::vector<InitiationTuple>& id,
                                     const std::vector<double>& scales,
                                     const AbstractionConfig& cfg) {
    if (td.empty()) throw std::invalid_argument("build_abstraction: empty TD");
    Abstraction a;
    a.scales = scales;

    std::vector<LowLevelState> norm_s, norm_sp, norm_id_s;
    norm_s.reserve(td.size());
    norm_sp.reserve(td.size());
    for (const auto& t : td) {
        norm_s.push_back(normalize_state(t.s, scales));
        norm_sp.push_back(normalize_state(t.s_prime, scales));
    }
    norm_id_s.reserve(id.size());
    for (const auto& t : id) norm_id_s.push_back(normalize_state(t.s, scales));

    a.factors = compute_factors(td, static_cast<int>(td[0].s.size()));

    auto pre = partition_transitions(td, norm_sp, cfg, &a.warnings);
    a.partitions = merge_partitions(std::move(pre), norm_s, cfg);
    learn_preconditions(a.partitions, id, norm_id_s, norm_s, a.factors, cfg);

    SymbolTable table = generate_symbols(a.partitions, a.factors, norm_s, norm_sp, cfg);
    a.symbols = table.symbols;

    std::set<Option> opts;
    for (const auto& t : td) opts.insert(t.option);
    for (const auto& t : id) opts.insert(t.option);
    a.options.assign(opts.begin(), opts.end());

    a.domain = synthesize_domain(a.partitions, table, a.factors, td, norm_s, a.options, cfg,
                                 &a.warnings);
    return a;
}

// Every symbol whose classifier accepts the state, plus notfailed: the
// grounding used for problem :init sections. Overlapping symbols of the same
// factor may hold simultaneously; that is sound because every operator that
// changes a factor deletes all of the factor's siblings, so stale symbols
// cannot survive the first move. The richer init matters at replanning time:
// an operator's precondition symbol is applicable whenever it accepts the
// physical state, not only when it happens to be the factor's best fit.
inline std::vector<std::string> ground_state_all(const std::vector<Symbol>& symbols,
                                                 const LowLevelState& normalized) {
    std::vector<std::string> out{"notfailed"};
    for (const auto& s : symbols) {
        std::vector<double> proj;
        proj.reserve(s.vars.size());
        for (int v : s.vars) proj.push_back(normalized[v]);
        if (s.density.logpdf(proj) - s.log_threshold >= 0) out.push_back(s.name);
    }
    std::sort(out.begin(), out.end(), predicate_less);
    return out;
}

// Best-fitting symbol per factor (largest margin over its threshold): the
// grounding used for goal conjunctions and symbolic summaries, where exactly
// one value per factor is wanted.
inline std::vector<std::string> ground_state(const std::vector<Symbol>& symbols,
                                             const LowLevelState& normalized) {
    std::map<int, std::pair<double, const Symbol*>> best;  // factor -> margin, symbol
    for (const auto& s : symbols) {
        std::vector<double> proj;
        proj.reserve(s.vars.size());
        for (int v : s.vars) proj.push_back(normalized[v]);
        double margin = s.density.logpdf(proj) - s.log_threshold;
        if (margin < 0) continue;
        auto it = best.find(s.factor);
        if (it == best.end() || margin > it->second.first) best[s.factor] = {margin, &s};
    }
    std::vector<std::string> out{"notfailed"};
    for (const auto& [f, ms] : best) out.push_back(ms.second->name);
    std::sort(out.begin(), out.end(), predicate_less);
    return out;
}

}  // namespace dpa
