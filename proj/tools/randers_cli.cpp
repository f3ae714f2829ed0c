#include <iostream>

#include <CLI11.hpp>

#include "randers/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Randers boundary distance toolkit: forward simulation and recovery"};
    app.require_subcommand(1);

    randers::CommandLine cmd;
    std::uint64_t seed = 0;
    int threads = 0;

    const char* descriptions[][2] = {
        {"simulate", "Compute the boundary distance matrix of a scenario"},
        {"decompose", "Split boundary distances into symmetric part and 1-form integrals"},
        {"recover", "Compare two scenarios from their boundary data and write a report"},
        {"verify", "Run the property suites on a scenario"},
        {"plotdata", "Write geodesic fan and sound-speed profile CSVs"},
    };
    for (const auto& [name, text] : descriptions) {
        CLI::App* sub = app.add_subcommand(name, text);
        sub->add_option("--config", cmd.configs, "Scenario file (recover takes two)")->check(CLI::ExistingFile);
        sub->add_option("--data", cmd.data, "Boundary distance CSV instead of simulating")->check(CLI::ExistingFile);
        sub->add_option("--out", cmd.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
        sub->callback([&cmd, name = std::string(name)]() { cmd.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : randers::exit_usage;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed")) cmd.seed = seed;
        if (sub->count("--threads")) cmd.threads = threads;
    }
    return randers::run_command(cmd, std::cout, std::cerr);
}
