#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minkowski/harness.hpp"

int main(int argc, char** argv) {
    using namespace minkowski;

    CLI::App app{"Verification suites and sweeps for normal graphs over the unit sphere"};
    app.set_config("--config", "", "TOML/INI file with option defaults; flags win");

    std::string positional, command;
    std::string k_range = "7..11";
    std::vector<double> alphas;
    RunConfig config;

    app.add_option("command_arg", positional, "verify-basis | verify-wigner | verify-geometry | sweep | report");
    app.add_option("--command", command, "Same as the positional command");
    app.add_option("--k", k_range, "k range as a..b (l = 2^k)")->capture_default_str();
    app.add_option("--alpha", alphas, "alpha values, comma separated")->delimiter(',');
    app.add_option("--threads", config.threads, "Worker threads, 0 = hardware")->capture_default_str();
    app.add_option("--seed", config.seed, "Seed for randomized checks")->capture_default_str();
    app.add_option("--out-dir", config.out_dir, "Directory for report files")->capture_default_str();
    app.add_option("--format", config.format, "csv or json")->capture_default_str();
    app.add_option("--in", config.input, "Sweep CSV consumed by report");
    app.add_option("--delta", config.delta, "Slack in the 3j lower bound")->capture_default_str();

    std::map<std::string, std::optional<double>> tol, budget;
    for (const char* suite : {"basis", "wigner", "geometry", "sweep", "report"})
        app.add_option(std::string("--tol.") + suite, tol[suite], std::string("Tolerance scale for ") + suite);
    for (const char* name : {"triple_cap", "path_cap", "node_cap", "degree_cap"})
        app.add_option(std::string("--budget.") + name, budget[name], std::string("Budget: ") + name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    if (!positional.empty() && !command.empty() && positional != command) {
        std::cerr << "config error: conflicting commands '" << positional << "' and '" << command << "'\n";
        return kExitConfigError;
    }
    config.command = command.empty() ? positional : command;
    if (!alphas.empty())
        config.alphas = alphas;
    for (const auto& [suite, value] : tol)
        if (value)
            config.tolerance_scale[suite] = *value;
    for (const auto& [name, value] : budget)
        if (value)
            config.budgets[name] = *value;
    try {
        std::tie(config.k_lo, config.k_hi) = parse_k_range(k_range);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    return run(config, std::cout);
}
