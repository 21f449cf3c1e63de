#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "incrcert/runner.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitUnsolved = 3;

int outcome_to_exit(incrcert::RunOutcome outcome) { return static_cast<int>(outcome); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incrcert - incremental dissipativity certification for discrete-time "
                 "nonlinear systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run an analysis described by a JSON config");
    run->add_option("--config", config_path, "path to the analysis config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: current directory)");
    run->add_option("--seed", seed, "override the config RNG seed")->each([&](const std::string&) {
        seed_given = true;
    });
    run->add_flag("--quiet", quiet, "suppress the summary on stdout");

    std::string cert_path;
    std::string system_name;
    int n_pairs = 100;
    auto* validate = app.add_subcommand("validate",
                                        "check a certificate against sampled trajectory pairs");
    validate->add_option("--cert", cert_path, "certificate JSON emitted by a previous run")
        ->required();
    validate->add_option("--system", system_name, "builtin system name")->required();
    validate->add_option("--pairs", n_pairs, "number of trajectory pairs (default 100)");
    validate->add_option("--seed", seed, "RNG seed for pair sampling (default 0)");
    validate->add_option("--out", out_dir, "output directory (default: current directory)");
    validate->add_flag("--quiet", quiet, "suppress the report on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            incrcert::AnalysisConfig config = incrcert::AnalysisConfig::load(config_path);
            if (seed_given) config.seed = seed;
            return outcome_to_exit(incrcert::run_analysis(config, out_dir, std::cout, quiet));
        }
        return outcome_to_exit(incrcert::validate_certificate(cert_path, system_name, n_pairs,
                                                              seed, out_dir, std::cout, quiet));
    } catch (const incrcert::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const incrcert::ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnsolved;
    }
}
