#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "incrcert/analysis.hpp"
#include "incrcert/builtins.hpp"
#include "incrcert/serialization.hpp"

namespace incrcert {

/// Raised on malformed configs and bad CLI usage (exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class DisturbanceKind { Zero, Constant, RampSaturating };

struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::Zero;
    double value = 0.0;          // constant level
    double slope = 0.0;          // ramp slope per step
    std::size_t saturation_step = 0;

    std::vector<Vector> realize(Index n_w, std::size_t horizon) const;
};

struct SimulationSpec {
    std::size_t horizon = 1000;
    Vector x0;
    DisturbanceSpec disturbance;
    std::size_t settle_k = 500;
    double tol = 1e-6;
};

struct ValidationSpec {
    std::string certificate_path;
    int pairs = 100;
};

/// One analysis run loaded from a JSON document. See docs in the repository
/// README for the schema.
struct AnalysisConfig {
    std::string system;
    std::string analysis;  // li2 | qsr | passivity | simulate | validate
    std::optional<std::vector<int>> grid;
    std::optional<BoxRegion> region;
    AnalysisOptions tolerances;
    std::optional<SupplyQSR> supply;
    std::optional<SimulationSpec> simulation;
    std::optional<ValidationSpec> validation;
    std::uint64_t seed = 0;
    std::string out_certificate = "certificate.json";
    std::string out_trajectory = "trajectory.csv";
    std::string out_summary = "summary.txt";
    std::string out_report = "report.json";

    static AnalysisConfig from_json(const nlohmann::json& j);
    static AnalysisConfig load(const std::filesystem::path& path);
};

enum class RunOutcome : int {
    Completed = 0,      // certified / simulation finished / validation passed
    NoCertificate = 2,  // Infeasible or Unbounded (or validation found a violation)
    Unsolved = 3,       // solver numerical failure
};

/// Executes the configured analysis, writing artifacts under out_dir and a
/// one-screen summary to `log` (unless quiet).
RunOutcome run_analysis(const AnalysisConfig& config, const std::filesystem::path& out_dir,
                        std::ostream& log, bool quiet = false);

/// Certificate validation against freshly sampled in-region trajectory pairs:
/// max dissipation violation and (for gain certificates) the empirical gain
/// lower bound. Passes when violation <= 1e-6 and bound <= gamma + 1e-6.
RunOutcome validate_certificate(const std::filesystem::path& certificate_path,
                                const std::string& system_name, int n_pairs, std::uint64_t seed,
                                const std::filesystem::path& out_dir, std::ostream& log,
                                bool quiet = false);

}  // namespace incrcert
