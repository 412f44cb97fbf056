#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "ulwaves/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Water-wave simulator and analysis scenarios"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    bool echo_only = false;

    const std::vector<std::string> scenarios{"simulate", "canal", "basin", "dno-test", "paradiff-test", "dispersive", "norms"};
    std::vector<CLI::App*> subs;
    for (const auto& name : scenarios) subs.push_back(app.add_subcommand(name, "run the " + name + " scenario"));
    subs.push_back(app.add_subcommand("run", "run the scenario named in the configuration"));
    for (CLI::App* sub : subs) {
        sub->add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", overrides, "override a key, e.g. --set stepper.dt=0.005");
        sub->add_option("-o,--output", output, "output directory (output.dir)");
        sub->add_flag("--echo", echo_only, "print the effective configuration and exit");
    }
    CLI11_PARSE(app, argc, argv);

    // Single-threaded build: the thread count is read and reported only.
    if (const char* t = std::getenv("ULWAVES_THREADS")) {
        const int n = std::atoi(t);
        if (n < 1) {
            std::cerr << "ULWAVES_THREADS must be a positive integer\n";
            return ulwaves::exit_config;
        }
        if (n > 1) std::cerr << "note: ULWAVES_THREADS=" << n << " requested; this build runs single-threaded\n";
    }

    try {
        ulwaves::RunConfig cfg = config_path.empty() ? ulwaves::RunConfig{} : ulwaves::parse_config(config_path);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub != "run") cfg.set("scenario", sub, "command line");
        for (const auto& o : overrides) ulwaves::apply_override(cfg, o);
        if (!output.empty()) cfg.set("output.dir", output, "command line");
        cfg.validate();
        if (echo_only) {
            std::cout << cfg.echo();
            return ulwaves::exit_ok;
        }
        return ulwaves::run(cfg, std::cout);
    } catch (const ulwaves::RunConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return ulwaves::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ulwaves::exit_failure;
    }
}
