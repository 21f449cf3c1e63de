#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "incrcert/embedding.hpp"
#include "incrcert/sdp.hpp"
#include "incrcert/supply.hpp"

namespace incrcert {

/// Computational proof object: a quadratic incremental storage matrix P > 0
/// certifying the gridded LMI family over `region`, with the certified gain
/// when produced by the l2 analysis.
struct StorageCertificate {
    Matrix P;
    std::optional<double> gamma;
    BoxRegion region;
    std::vector<int> grid;
    double min_eigen_margin = 0.0;  // smallest slack eigenvalue across the grid LMIs
    std::string solver_status;
    std::uint64_t seed = 0;
    std::string system;
    std::string analysis;
    std::optional<SupplyQSR> supply;  // recorded for qsr certificates
};

void to_json(nlohmann::json& j, const StorageCertificate& cert);
void from_json(const nlohmann::json& j, StorageCertificate& cert);

struct AnalysisOptions {
    double feas_tol = 1e-7;
    double bisect_tol = 1e-3;
    double gamma_cap = 1e3;
    double trace_cap = 1e6;
};

struct GainResult {
    enum class Outcome { Certified, Unbounded, Unsolved };
    Outcome outcome = Outcome::Unsolved;
    double gamma_upper = 0.0;
    StorageCertificate certificate;
    int feasibility_solves = 0;
    std::string message;
};

struct CheckResult {
    SolveStatus status = SolveStatus::Unsolved;
    StorageCertificate certificate;  // valid when status == Feasible
    std::string message;
};

/// Bisection on gamma over (0, gamma_cap] with the Schur-form family at all
/// grid points sharing one Pbar. Returns the smallest certified gamma within
/// bisect_tol and the storage certificate P = gamma * Pbar^-1; Unbounded if
/// no certificate exists up to gamma_cap.
GainResult compute_li2_gain(const GriddedEmbedding& emb, const AnalysisOptions& opts = {},
                            const SdpBackend& backend = default_backend());

/// One shared P over all grid-point (Q,S,R) blocks.
CheckResult check_incremental_qsr(const GriddedEmbedding& emb, const SupplyQSR& supply,
                                  const AnalysisOptions& opts = {},
                                  const SdpBackend& backend = default_backend());

/// One shared P over all grid-point passivity blocks (requires n_w = n_z).
CheckResult check_passivity(const GriddedEmbedding& emb, const AnalysisOptions& opts = {},
                            const SdpBackend& backend = default_backend());

/// Storage matrix of the (Q,S,R) form recovered from a Schur-form variable:
/// P = gamma * Pbar^-1 (symmetrized).
Matrix storage_from_schur(const Matrix& Pbar, double gamma);

}  // namespace incrcert
