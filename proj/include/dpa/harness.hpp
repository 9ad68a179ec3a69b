#pragma once

#include <chrono>
#include <cmath>
#include <exception>
#include <set>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dpa/abstraction.hpp"
#include "dpa/builtin_maps.hpp"
#include "dpa/datasets.hpp"
#include "dpa/goal_selector.hpp"
#include "dpa/planner.hpp"

namespace dpa {

// Orchestrates the discover-plan-act loop: per cycle, discover options,
// collect option-level data, rebuild the symbolic domain from scratch, pick
// an exploration target, and test whether the game goal is solvable.

struct RunConfig {
    std::string map_id = "domain3";
    Strategy strategy = Strategy::GoalBabbling;
    int cycles = 15;
    int trials = 10;
    int dpa_eps = 4;
    int dpa_steps = 0;  // 0 -> per-map default
    int d_eps = 1;
    int d_steps = 200;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool parallel_trials = true;
    std::size_t plan_max_expansions = 200'000;
    AbstractionConfig abstraction;
};

inline int default_dpa_steps(const std::string& map_id) {
    if (map_id == "domain1" || map_id == "domain2") return 50;
    if (map_id == "domain3") return 150;
    if (map_id == "domain4") return 200;
    if (map_id == "domain5") return 800;
    return 150;
}

struct CycleReport {
    int cycle = 0;
    std::size_t n_options = 0, n_id = 0, n_td = 0;
    std::size_t n_symbols = 0, n_operators = 0;
    std::vector<std::string> target_conjunction;
    std::size_t plan_ex_len = 0;
    bool plan_g_found = false;
    bool plan_g_executed = false;
    std::size_t plan_g_len = 0;
    double wall_time_s = 0.0;
    std::vector<std::string> notes;

    nlohmann::json to_json() const {
        return {{"cycle", cycle},
                {"options", n_options},
                {"id", n_id},
                {"td", n_td},
                {"symbols", n_symbols},
                {"operators", n_operators},
                {"target_conjunction", target_conjunction},
                {"plan_ex_len", plan_ex_len},
                {"plan_g_found", plan_g_found},
                {"plan_g_executed", plan_g_executed},
                {"plan_g_len", plan_g_len},
                {"wall_time_s", wall_time_s},
                {"notes", notes}};
    }
};

struct TrialState {
    Environment env;
    std::vector<Option> options;
    Datasets data;
    std::vector<Option> plan_ex;  // produced in cycle c, consumed in cycle c+1
};

namespace detail {

inline std::optional<std::vector<Option>> resolve_plan(const Plan& plan,
                                                       const std::vector<Option>& options) {
    std::vector<Option> out;
    for (const auto& step : plan.steps) {
        auto idx = operator_option_index(step);
        if (!idx || *idx < 0 || *idx >= static_cast<int>(options.size())) return std::nullopt;
        out.push_back(options[*idx]);
    }
    return out;
}

// All-outcomes determinization gambles on a specific outcome per step, so an
// open-loop plan derails as soon as an option lands on an unplanned branch.
// The executor therefore runs in a replan-every-step loop: plan from the
// grounding of the actual current state, execute only the first option, and
// plan again. Operators that are applicable in the current grounding but
// whose option cannot physically initiate right now are pruned before each
// search, which guarantees the first step of every plan is executable.
// Symbol-level per-step checks on the rest of the plan are pointless here:
// overlapping symbols make grounded names unreliable witnesses of progress.
// Two escapes keep the loop from cycling forever: revisiting an already-seen
// grounding bans the first step of the plan that led back to it, and a dead
// end (no plan) drops the bans once, then falls back to one random feasible
// option to leave the unmodelled state.
inline bool execute_with_replanning(Environment& env, const Abstraction& abs,
                                    const std::vector<std::string>& goal,
                                    std::size_t max_expansions, std::uint64_t seed,
                                    int max_replans = 60) {
    std::set<std::string> banned;
    std::set<std::string> seen_states;
    for (int round = 0; round <= max_replans; ++round) {
        if (env.goal_reached()) return true;
        PpddlProblem p;
        p.name = "replan";
        p.domain_name = abs.domain.name;
        p.init = ground_state_all(abs.symbols, normalize_state(env.state(), abs.scales));
        p.goal = goal;

        std::set<std::string> init_set(p.init.begin(), p.init.end());
        auto avail = env.available_primitives();
        PpddlDomain dom = abs.domain;
        std::erase_if(dom.operators, [&](const PpddlOperator& op) {
            if (banned.count(op.name)) return true;
            auto idx = operator_option_index(op.name);
            if (!idx || avail.count(abs.options[*idx].a_p)) return false;
            for (const auto& pre : op.precondition)
                if (!init_set.count(pre)) return false;
            return true;  // applicable in this grounding, not executable here
        });

        auto pl = plan(dom, p, max_expansions);
        if (!pl || pl->steps.empty()) {
            if (pl) return env.goal_reached();  // symbolic goal holds, flag decides
            if (!banned.empty()) {
                banned.clear();
                seen_states.clear();
                continue;
            }
            std::vector<Option> feasible;
            for (const auto& o : abs.options)
                if (avail.count(o.a_p)) feasible.push_back(o);
            if (feasible.empty()) return env.goal_reached();
            Rng jig(derive_seed(seed, 0xA5A5 + static_cast<std::uint64_t>(round)));
            execute_option(env,
                           feasible[uniform_int(jig, 0, static_cast<int>(feasible.size()) - 1)]);
            continue;
        }
        auto resolved = resolve_plan(*pl, abs.options);
        if (!resolved) return env.goal_reached();

        std::string state_key;
        for (const auto& nm : p.init) state_key += nm + "|";
        if (!seen_states.insert(state_key).second) banned.insert(pl->steps.front());

        execute_option(env, resolved->front());
    }
    return env.goal_reached();
}

}  // namespace detail

// One pass over Alg-1 lines 8-18. Failures in abstraction or planning clear
// the exploration plan but never abort the trial.
inline CycleReport run_dpa_cycle(TrialState& state, const RunConfig& cfg, int cycle,
                                 std::uint64_t trial_seed) {
    auto t0 = std::chrono::steady_clock::now();
    CycleReport rep;
    rep.cycle = cycle;
    auto stream = [&](std::uint64_t k) {
        return derive_seed(trial_seed, static_cast<std::uint64_t>(cycle) * 16 + k);
    };

    // 1. discover options, consuming last cycle's exploration plan
    Rng rng_d(stream(1));
    auto discovered = discover_options(state.env, cfg.d_eps, cfg.d_steps, state.plan_ex, rng_d);
    for (const auto& o : discovered)
        if (std::find(state.options.begin(), state.options.end(), o) == state.options.end())
            state.options.push_back(o);
    std::sort(state.options.begin(), state.options.end());

    // 2. collect data with the same exploration-plan prefix
    Rng rng_c(stream(2));
    Datasets fresh = collect_data(state.env, cfg.dpa_eps, cfg.dpa_steps, state.options,
                                  state.plan_ex, rng_c);
    state.data.id.insert(state.data.id.end(), fresh.id.begin(), fresh.id.end());
    state.data.td.insert(state.data.td.end(), fresh.td.begin(), fresh.td.end());
    state.plan_ex.clear();

    rep.n_options = state.options.size();
    rep.n_id = state.data.id.size();
    rep.n_td = state.data.td.size();
    if (state.data.td.empty()) {
        rep.notes.push_back("no transitions yet");
        rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
        return rep;
    }

    // 3. rebuild the abstraction from scratch
    auto scales = state.env.normalization_scales();
    std::optional<Abstraction> abs;
    try {
        AbstractionConfig acfg = cfg.abstraction;
        acfg.seed = stream(3);
        abs = build_abstraction(state.data.td, state.data.id, scales, acfg);
        rep.n_symbols = abs->symbols.size();
        rep.n_operators = abs->domain.operators.size();
        for (const auto& w : abs->warnings) rep.notes.push_back(w);
    } catch (const std::exception& e) {
        rep.notes.push_back(std::string("abstraction failed: ") + e.what());
    }

    LowLevelState s_init = normalize_state(state.env.reset().state, scales);
    std::vector<LowLevelState> visited;
    visited.reserve(state.data.td.size() * 2);
    for (const auto& t : state.data.td) {
        visited.push_back(normalize_state(t.s, scales));
        visited.push_back(normalize_state(t.s_prime, scales));
    }

    // 4. exploration target and plan for the next cycle
    if (abs) {
        std::set<std::string> addable, init_true;
        for (const auto& nm : ground_state_all(abs->symbols, s_init)) init_true.insert(nm);
        for (const auto& op : abs->domain.operators)
            for (const auto& oc : op.outcomes)
                for (const auto& a : oc.add) addable.insert(a);

        Rng rng_t(stream(4));
        auto target = select_target(cfg.strategy, visited, s_init, rng_t);
        if (target) {
            try {
                auto conjs = anchored_conjunctions(*target, abs->symbols, abs->factors,
                                                   addable, init_true, 3, 6);
                if (!conjs.empty()) rep.target_conjunction = conjs.front().symbols;
                for (const auto& conj : conjs) {
                    PpddlProblem p;
                    p.name = "exploration-goal";
                    p.domain_name = abs->domain.name;
                    p.init = ground_state_all(abs->symbols, s_init);
                    p.goal = conj.symbols;
                    p.goal.push_back("notfailed");
                    auto pl = plan(abs->domain, p, cfg.plan_max_expansions);
                    if (!pl) continue;
                    if (auto resolved = detail::resolve_plan(*pl, abs->options)) {
                        state.plan_ex = *resolved;
                        rep.plan_ex_len = resolved->size();
                        rep.target_conjunction = conj.symbols;
                        break;
                    }
                }
            } catch (const std::exception& e) {
                rep.notes.push_back(std::string("target translation failed: ") + e.what());
            }
        }

        // 5. game-goal validity check with low-level execution
        try {
            // the game goal: agent back at the home cell, treasure in the bag.
            // The agent's y reading is foot-anchored inside the cell, so the
            // goal uses the standing position rather than the cell center.
            LowLevelState s_g = s_init;
            const auto& lo = state.env.layout();
            auto bag = state.env.map().bag;
            auto home = state.env.map().home;
            s_g[lo.x_agent()] = MazeMap::center_x(home) / scales[lo.x_agent()];
            s_g[lo.y_agent()] =
                (home.cy * kCellPx + kCellPx - kAgentPx / 2.0) / scales[lo.y_agent()];
            s_g[lo.treasure_x()] = MazeMap::center_x(bag) / scales[lo.treasure_x()];
            s_g[lo.treasure_y()] = MazeMap::center_y(bag) / scales[lo.treasure_y()];
            // only the factors the goal flag actually checks: agent position
            // and treasure location. Pinning levers or keys to their start
            // values would over-constrain the goal, sometimes unsatisfiably.
            std::set<int> goal_vars{lo.x_agent(), lo.y_agent(), lo.treasure_x(),
                                    lo.treasure_y()};
            std::vector<Factor> goal_factors;
            for (const auto& f : abs->factors)
                for (int v : f.vars)
                    if (goal_vars.count(v)) {
                        goal_factors.push_back(f);
                        break;
                    }
            auto gconjs =
                anchored_conjunctions(s_g, abs->symbols, goal_factors, addable, init_true);

            // every goal factor must be pinned, otherwise the symbolic goal
            // does not describe the game goal yet. All candidate conjunctions
            // pin the same factors, so checking the first one suffices.
            bool covered = !gconjs.empty();
            if (covered)
                for (const auto& f : goal_factors) {
                    bool pinned = false;
                    for (const auto& nm : gconjs.front().symbols)
                        for (const auto& sym : abs->symbols)
                            if (sym.name == nm && sym.factor == f.id) pinned = true;
                    if (!pinned) covered = false;
                }
            if (!covered) rep.notes.push_back("game goal not expressible yet");
            // a conjunction can be symbolically unreachable or its plan can
            // fail on the real game; either way the next candidate gets a shot
            if (covered)
                for (const auto& gconj : gconjs) {
                    PpddlProblem pg;
                    pg.name = "game-goal";
                    pg.domain_name = abs->domain.name;
                    pg.init = ground_state_all(abs->symbols, s_init);
                    pg.goal = gconj.symbols;
                    pg.goal.push_back("notfailed");
                    auto pl = plan(abs->domain, pg, cfg.plan_max_expansions);
                    if (!pl) continue;
                    if (!rep.plan_g_found) {
                        rep.plan_g_found = true;
                        rep.plan_g_len = pl->steps.size();
                    }
                    Environment fresh = load_builtin(cfg.map_id, stream(6));
                    fresh.reset();
                    if (detail::execute_with_replanning(fresh, *abs, pg.goal,
                                                        cfg.plan_max_expansions, stream(7))) {
                        rep.plan_g_executed = true;
                        rep.plan_g_len = pl->steps.size();
                        break;
                    }
                }
        } catch (const std::exception& e) {
            rep.notes.push_back(std::string("validity check failed: ") + e.what());
        }
    }

    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

struct ExperimentResult {
    // success[trial][cycle]: game plan found and executed to the goal flag
    std::vector<std::vector<bool>> success;
    std::vector<std::vector<CycleReport>> reports;  // per trial
    std::vector<std::string> diagnostics;           // one slot per trial, "" when clean
};

inline void run_trial(const RunConfig& cfg, int trial, ExperimentResult& result) {
    std::uint64_t trial_seed = derive_seed(cfg.seed, 0x7431 + trial);
    try {
        TrialState state{load_builtin(cfg.map_id, derive_seed(trial_seed, 0xE47)), {}, {}, {}};
        for (int c = 0; c < cfg.cycles; ++c) {
            CycleReport rep = run_dpa_cycle(state, cfg, c, trial_seed);
            result.success[trial][c] = rep.plan_g_found && rep.plan_g_executed;
            result.reports[trial].push_back(std::move(rep));
        }
    } catch (const std::exception& e) {
        std::fill(result.success[trial].begin(), result.success[trial].end(), false);
        result.diagnostics[trial] =
            "trial " + std::to_string(trial) + " crashed: " + e.what();
    }
}

inline ExperimentResult run_experiment(RunConfig cfg) {
    if (cfg.dpa_steps <= 0) cfg.dpa_steps = default_dpa_steps(cfg.map_id);
    ExperimentResult result;
    result.success.assign(cfg.trials, std::vector<bool>(cfg.cycles, false));
    result.reports.assign(cfg.trials, {});
    result.diagnostics.assign(cfg.trials, "");
    if (cfg.parallel_trials && cfg.trials > 1) {
        std::vector<std::thread> threads;
        for (int t = 0; t < cfg.trials; ++t)
            threads.emplace_back([&, t] { run_trial(cfg, t, result); });
        for (auto& th : threads) th.join();
    } else {
        for (int t = 0; t < cfg.trials; ++t) run_trial(cfg, t, result);
    }
    return result;
}

inline std::vector<double> success_percentages(const ExperimentResult& r) {
    if (r.success.empty()) return {};
    std::vector<double> pct(r.success[0].size(), 0.0);
    for (const auto& row : r.success)
        for (std::size_t c = 0; c < row.size(); ++c) pct[c] += row[c] ? 1.0 : 0.0;
    for (auto& p : pct) p *= 100.0 / static_cast<double>(r.success.size());
    return pct;
}

inline std::string render_success_chart(const std::vector<double>& pct,
                                        const std::string& title) {
    const int w = 640, h = 420, ml = 60, mb = 50, mt = 40, mr = 20;
    const double pw = w - ml - mr, ph = h - mt - mb;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
       << mt + ph << "\" stroke=\"black\"/>\n";
    for (int g = 0; g <= 100; g += 20) {
        double y = mt + ph - ph * g / 100.0;
        os << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << g << "</text>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n";
    }
    if (!pct.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t c = 0; c < pct.size(); ++c) {
            double x = ml + (pct.size() == 1 ? 0 : pw * c / (pct.size() - 1));
            double y = mt + ph - ph * pct[c] / 100.0;
            os << x << "," << y << " ";
        }
        os << "\"/>\n";
        for (std::size_t c = 0; c < pct.size(); ++c) {
            double x = ml + (pct.size() == 1 ? 0 : pw * c / (pct.size() - 1));
            os << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
               << "\" text-anchor=\"middle\" font-size=\"11\">" << c << "</text>\n";
        }
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">cycle</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << mt + ph / 2 << ")\">% success</text>\n";
    os << "</svg>\n";
    return os.str();
}

inline void emit_report(const ExperimentResult& result, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);

    auto pct = success_percentages(result);
    {
        std::ofstream csv(dir / "success.csv");
        csv << "cycle,strategy,pct\n";
        for (std::size_t c = 0; c < pct.size(); ++c)
            csv << c << ',' << to_string(cfg.strategy) << ',' << pct[c] << '\n';
    }
    {
        std::ofstream jsonl(dir / "cycles.jsonl");
        for (std::size_t t = 0; t < result.reports.size(); ++t)
            for (const auto& rep : result.reports[t]) {
                nlohmann::json j = rep.to_json();
                j["trial"] = t;
                j["strategy"] = to_string(cfg.strategy);
                j["map"] = cfg.map_id;
                jsonl << j.dump() << '\n';
            }
    }
    {
        std::ofstream svg(dir / ("success_" + cfg.map_id + "_" + to_string(cfg.strategy) +
                                 ".svg"));
        svg << render_success_chart(pct, cfg.map_id + " / " + to_string(cfg.strategy));
    }
    bool any_diag = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                [](const std::string& d) { return !d.empty(); });
    if (any_diag) {
        std::ofstream diag(dir / "diagnostics.txt");
        for (const auto& d : result.diagnostics)
            if (!d.empty()) diag << d << '\n';
    }
}

}  // namespace dpa
