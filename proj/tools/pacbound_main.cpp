#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pacbound/experiment.hpp"

// Exit codes: 0 success, 1 validation failure, 2 numerical failure.
int main(int argc, char** argv) {
    CLI::App app{"Concentration and PAC-Bayes bound experiments over finite "
                 "hypothesis classes"};
    std::string config_path;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    int threads = -1;
    app.add_option("--config", config_path, "experiment config file (JSON)")
        ->required();
    auto* out_opt = app.add_option("--out", out, "output file path (overrides config)");
    auto* fmt_opt =
        app.add_option("--format", format, "output format: csv or text")
            ->check(CLI::IsMember({"csv", "text"}));
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
    auto* threads_opt =
        app.add_option("--threads", threads, "worker threads, 0 = auto");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    pacbound::Overrides overrides;
    if (*out_opt) overrides.out = out;
    if (*fmt_opt) overrides.format = format;
    if (*seed_opt) overrides.seed = seed;
    if (*threads_opt) overrides.threads = threads;

    try {
        return pacbound::run_experiment(config_path, overrides);
    } catch (const pacbound::ConfigError& e) {
        std::cerr << "config error: field '" << e.field << "': " << e.what() << "\n";
        return 1;
    } catch (const pacbound::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
