// minerkelly command-line tool.
//
//   minerkelly optimize --scenario s.json
//   minerkelly equilibrium --scenario s.json --format json
//   minerkelly simulate --scenario s.json --trajectories 1000 --out sim.csv
//   minerkelly sweep --scenario s.json --grid 1000
//   minerkelly verify-poisson --scenario s.json --trajectories 100000
//   minerkelly example bitcoin
//
// Exit codes: 0 success, 1 failure (including a rejected Poisson check),
// 2 malformed scenario or command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "minerkelly/errors.hpp"
#include "minerkelly/report.hpp"
#include "minerkelly/scenario_io.hpp"

namespace mk = minerkelly;

namespace {

struct Config {
    std::string scenario_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::size_t trajectories = 1000;
    std::size_t grid = 1000;
    bool retarget = false;
    double tolerance = 0.01;
    unsigned workers = 1;
    std::string example;
};

mk::Scenario scenario_from(const Config& cfg) {
    if (cfg.scenario_path.empty()) throw mk::ScenarioError("--scenario", "a scenario file is required");
    mk::Scenario s = mk::load_scenario(cfg.scenario_path);
    if (cfg.seed) s.seed = *cfg.seed;
    return mk::resolve_scenario(std::move(s));
}

void emit(const Config& cfg, const mk::Table& table) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.out_path.empty()) {
        file.open(cfg.out_path);
        if (!file) throw std::runtime_error("cannot write " + cfg.out_path);
        out = &file;
    }
    if (cfg.format == "json") {
        *out << mk::to_json(table).dump(2) << '\n';
    } else {
        mk::write_csv(*out, table);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kelly leverage, hash-rate equilibrium and Monte Carlo for proof-of-work miners"};
    app.require_subcommand(1);
    Config cfg;

    auto add_common = [&](CLI::App* cmd, bool scenario) {
        if (scenario) cmd->add_option("--scenario", cfg.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", cfg.out_path, "output file (default stdout)");
        cmd->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "override the scenario seed");
        cmd->add_option("--workers", cfg.workers, "worker threads, 0 for all cores (results do not depend on it)");
    };

    auto* optimize = app.add_subcommand("optimize", "optimal leverage and balance sheet per growth-rate player");
    add_common(optimize, true);
    auto* equilibrium = app.add_subcommand("equilibrium", "equilibrium mining assets, shares and dominance");
    add_common(equilibrium, true);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the repeated game");
    add_common(simulate, true);
    add_seed(simulate);
    simulate->add_option("--trajectories", cfg.trajectories, "number of trajectories");
    simulate->add_flag("--retarget-difficulty", cfg.retarget, "recompute the difficulty before every stage");
    auto* sweep = app.add_subcommand("sweep", "optimal leverage and log payoff against success probability");
    add_common(sweep, true);
    sweep->add_option("--grid", cfg.grid, "grid intervals over (0, 1)")->check(CLI::Range(2, 100000000));
    auto* verify = app.add_subcommand("verify-poisson", "KS test of simulated revenue against the Poisson reward model");
    add_common(verify, true);
    add_seed(verify);
    verify->add_option("--trajectories", cfg.trajectories, "samples per side");
    verify->add_option("--tolerance", cfg.tolerance, "significance level of the KS test")->check(CLI::Range(0.0, 1.0));
    auto* example = app.add_subcommand("example", "reproduce a worked example");
    add_common(example, false);
    example->add_option("name", cfg.example, "bitcoin or coinflip")->required()->check(CLI::IsMember({"bitcoin", "coinflip"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (optimize->parsed()) {
            emit(cfg, mk::optimize_report(scenario_from(cfg)));
        } else if (equilibrium->parsed()) {
            emit(cfg, mk::equilibrium_report(scenario_from(cfg)));
        } else if (simulate->parsed()) {
            mk::SimulationOptions opt;
            opt.trajectories = cfg.trajectories;
            opt.workers = cfg.workers;
            opt.retarget_difficulty = cfg.retarget;
            emit(cfg, mk::simulate_report(scenario_from(cfg), opt));
        } else if (sweep->parsed()) {
            emit(cfg, mk::sweep_report(scenario_from(cfg), cfg.grid));
        } else if (verify->parsed()) {
            if (cfg.trajectories == 0) throw std::invalid_argument("--trajectories must be > 0");
            bool rejected = false;
            emit(cfg, mk::verify_poisson_report(scenario_from(cfg), cfg.trajectories, cfg.tolerance, cfg.workers, rejected));
            if (rejected) {
                std::cerr << "verify-poisson: KS test rejects at alpha = " << cfg.tolerance << '\n';
                return 1;
            }
        } else if (example->parsed()) {
            emit(cfg, cfg.example == "bitcoin" ? mk::bitcoin_example() : mk::coinflip_example());
        }
    } catch (const mk::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
