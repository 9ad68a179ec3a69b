#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dpa/harness.hpp"

namespace {

std::string canonical_map_id(std::string id) {
    if (id.size() == 2 && id[0] == 'd' && id[1] >= '1' && id[1] <= '5')
        return "domain" + id.substr(1);
    return id;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool verbose_logging() {
    const char* lvl = std::getenv("DPA_LOG");
    return lvl && std::string(lvl) != "quiet";
}

int cmd_run(dpa::RunConfig cfg) {
    cfg.map_id = canonical_map_id(cfg.map_id);
    auto result = dpa::run_experiment(cfg);
    dpa::emit_report(result, cfg);
    auto pct = dpa::success_percentages(result);
    for (std::size_t c = 0; c < pct.size(); ++c)
        std::cout << "cycle " << c << ": " << pct[c] << "% success\n";
    if (verbose_logging())
        for (const auto& d : result.diagnostics)
            if (!d.empty()) std::cerr << d << '\n';
    return 0;
}

int cmd_plan(const std::string& domain_file, const std::string& problem_file) {
    dpa::PpddlDomain domain = dpa::parse_ppddl_domain(slurp(domain_file));
    dpa::PpddlProblem problem = dpa::parse_ppddl_problem(slurp(problem_file), domain);
    auto plan = dpa::plan(domain, problem);
    if (!plan) {
        std::cout << ";; no plan found\n";
        return 1;
    }
    std::cout << ";; plan for problem " << problem.name << " (cost " << plan->cost << ")\n";
    for (std::size_t i = 0; i < plan->steps.size(); ++i)
        std::cout << i << ": (" << plan->steps[i] << ")\n";
    return 0;
}

int cmd_abstract(const std::string& data_file, const std::string& out_file,
                 std::uint64_t seed) {
    std::ifstream in(data_file);
    if (!in) throw std::runtime_error("cannot open " + data_file);
    dpa::Datasets data = dpa::parse_datasets(in);
    if (data.td.empty()) throw std::runtime_error("dataset has no transitions");

    // offline scales: per-dimension maximum magnitude across all states
    std::vector<double> scales(data.td[0].s.size(), 1.0);
    auto widen = [&](const dpa::LowLevelState& s) {
        for (std::size_t i = 0; i < s.size() && i < scales.size(); ++i)
            scales[i] = std::max(scales[i], std::abs(s[i]));
    };
    for (const auto& t : data.td) widen(t.s), widen(t.s_prime);
    for (const auto& t : data.id) widen(t.s);

    dpa::AbstractionConfig cfg;
    cfg.seed = seed;
    dpa::Abstraction abs = dpa::build_abstraction(data.td, data.id, scales, cfg);
    std::string text = dpa::emit_ppddl(abs.domain);
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_file);
        out << text;
    }
    if (verbose_logging())
        for (const auto& w : abs.warnings) std::cerr << w << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discover-plan-act loop for the treasure game"};
    app.require_subcommand(1);

    dpa::RunConfig cfg;
    std::string strategy = "gb";
    auto* run = app.add_subcommand("run", "run the full loop and report success rates");
    run->add_option("--domain", cfg.map_id, "map id (domain1..domain5 or d1..d5)");
    run->add_option("--strategy", strategy, "ab | gb | dgb");
    run->add_option("--cycles", cfg.cycles, "cycles per trial");
    run->add_option("--trials", cfg.trials, "independent trials");
    run->add_option("--seed", cfg.seed, "master seed");
    run->add_option("--out", cfg.out_dir, "output directory");
    run->add_option("--dpa-steps", cfg.dpa_steps, "option steps per episode (0 = map default)");
    run->add_option("--dpa-eps", cfg.dpa_eps, "episodes per data collection");
    run->add_option("--d-steps", cfg.d_steps, "primitive steps per discovery episode");
    run->add_option("--d-eps", cfg.d_eps, "discovery episodes");
    run->add_flag("--serial", [&cfg](std::size_t) { cfg.parallel_trials = false; },
                  "run trials sequentially");

    std::string domain_file, problem_file;
    auto* plan_cmd = app.add_subcommand("plan", "plan on an emitted domain/problem pair");
    plan_cmd->add_option("--domain", domain_file, "domain file")->required();
    plan_cmd->add_option("--problem", problem_file, "problem file")->required();

    std::string data_file, abstract_out;
    std::uint64_t abstract_seed = 0;
    auto* abstract_cmd = app.add_subcommand("abstract", "re-run abstraction on a dataset dump");
    abstract_cmd->add_option("--data", data_file, "dataset file")->required();
    abstract_cmd->add_option("--out", abstract_out, "write the domain here (default stdout)");
    abstract_cmd->add_option("--seed", abstract_seed, "abstraction seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto s = dpa::strategy_from_string(strategy);
            if (!s) {
                std::cerr << "unknown strategy '" << strategy << "' (use ab, gb or dgb)\n";
                return 2;
            }
            cfg.strategy = *s;
            return cmd_run(cfg);
        }
        if (plan_cmd->parsed()) return cmd_plan(domain_file, problem_file);
        if (abstract_cmd->parsed()) return cmd_abstract(data_file, abstract_out, abstract_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
