#pragma once

#include <memory>
#include <string>

#include "incrcert/lmi.hpp"
#include "incrcert/types.hpp"

namespace incrcert {

enum class SolveStatus {
    Feasible,    // a point satisfying every constraint at the requested tolerance
    Infeasible,  // no feasible point found at the requested tolerance
    Unsolved     // numerical failure; no verdict
};

std::string to_string(SolveStatus status);

struct SolveOptions {
    double feas_tol = 1e-7;     // slack shift on constraint blocks and the P >= tol*I floor
    double gap_tol = 1e-9;      // duality-gap target of the interior-point method
    int max_iterations = 200;
    double trace_cap = 1e6;     // bound on trace(P) keeping the margin problem bounded
    bool early_feasibility_exit = false;  // stop as soon as a strictly feasible point is found
};

struct SolveResult {
    SolveStatus status = SolveStatus::Unsolved;
    Vector y;                    // variable vector (vech(P), then scalars); empty if Unsolved
    double margin = 0.0;         // exact min eigenvalue over the original blocks at y
    double max_margin_estimate = 0.0;  // solver's margin objective t* (shifted problem)
    int iterations = 0;
    bool infeasibility_proven = false;  // this backend does not produce dual certificates
    std::string message;
};

/// Pluggable semidefinite feasibility backend.
class SdpBackend {
public:
    virtual ~SdpBackend() = default;
    virtual std::string name() const = 0;

    /// Maximizes the uniform margin t subject to every block of `problem`
    /// being >= t*I (plus internal bounding constraints). The caller is
    /// responsible for tolerance shifts.
    virtual SolveResult max_margin(const LmiProblem& problem, const SolveOptions& opts) const = 0;
};

/// Primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector) specialized to block-diagonal LMI feasibility with a
/// handful of decision variables. Every verdict is confirmed by an exact
/// eigenvalue check of the returned point; Infeasible means "no feasible
/// point found at tolerance", not a proof of infeasibility.
class HkmBackend final : public SdpBackend {
public:
    std::string name() const override { return "hkm-ipm"; }
    SolveResult max_margin(const LmiProblem& problem, const SolveOptions& opts) const override;
};

const SdpBackend& default_backend();

/// Feasibility with the spec's tolerance semantics: finds y with
///   P >= feas_tol*I  and  every block >= -feas_tol*I,
/// or reports Infeasible/Unsolved. `margin` in the result is the exact
/// smallest block eigenvalue at the returned point (no shifts).
SolveResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts = {},
                              const SdpBackend& backend = default_backend());

}  // namespace incrcert
