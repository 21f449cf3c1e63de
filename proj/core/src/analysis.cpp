#include "incrcert/analysis.hpp"

#include "incrcert/serialization.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cstdio>

namespace incrcert {

namespace {

std::vector<double> row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

SolveOptions to_solve_options(const AnalysisOptions& opts) {
    SolveOptions s;
    s.feas_tol = opts.feas_tol;
    s.trace_cap = opts.trace_cap;
    return s;
}

/// Smallest slack eigenvalue of the (Q,S,R) family at P over the grid
/// (slack of the ⪯0 condition, i.e. min eig of the negated block).
double qsr_margin(const GriddedEmbedding& emb, const SupplyQSR& supply, const Matrix& P) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& mats : emb.matrices) {
        const Matrix block = -incremental_qsr_matrix(mats, supply, P);
        Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues().minCoeff());
    }
    return margin;
}

}  // namespace

Matrix storage_from_schur(const Matrix& Pbar, double gamma) {
    detail::require(gamma > 0.0, "storage_from_schur: gamma must be positive");
    Eigen::LLT<Matrix> llt(Pbar);
    detail::require(llt.info() == Eigen::Success,
                    "storage_from_schur: Pbar is not positive definite");
    Matrix P = gamma * llt.solve(Matrix::Identity(Pbar.rows(), Pbar.cols()));
    return (0.5 * (P + P.transpose())).eval();
}

GainResult compute_li2_gain(const GriddedEmbedding& emb, const AnalysisOptions& opts,
                            const SdpBackend& backend) {
    detail::require(!emb.matrices.empty(), "compute_li2_gain: empty embedding");
    detail::require(opts.bisect_tol > 0.0 && opts.gamma_cap > 0.0,
                    "compute_li2_gain: tolerances must be positive");

    GainResult result;
    SolveOptions probe_opts = to_solve_options(opts);
    probe_opts.early_feasibility_exit = true;

    const auto try_gamma = [&](double gamma, const SolveOptions& sopts) {
        ++result.feasibility_solves;
        return solve_feasibility(build_li2_problem(emb, gamma), sopts, backend);
    };

    SolveResult at_cap = try_gamma(opts.gamma_cap, probe_opts);
    if (at_cap.status == SolveStatus::Unsolved) {
        result.outcome = GainResult::Outcome::Unsolved;
        result.message = "solver failure at gamma_cap: " + at_cap.message;
        return result;
    }
    if (at_cap.status == SolveStatus::Infeasible) {
        result.outcome = GainResult::Outcome::Unbounded;
        result.message = "no certificate up to gamma_cap=" + std::to_string(opts.gamma_cap);
        return result;
    }

    double lo = 0.0;
    double hi = opts.gamma_cap;
    SolveResult best = at_cap;
    while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        SolveResult r = try_gamma(mid, probe_opts);
        if (r.status == SolveStatus::Unsolved) {
            result.outcome = GainResult::Outcome::Unsolved;
            result.message = "solver failure at gamma=" + std::to_string(mid) + ": " + r.message;
            return result;
        }
        if (r.status == SolveStatus::Feasible) {
            hi = mid;
            best = std::move(r);
        } else {
            lo = mid;
        }
    }

    // Polish the certificate at the certified endpoint: full-accuracy margin
    // maximization instead of the early-exit probe solution.
    SolveOptions final_opts = to_solve_options(opts);
    final_opts.early_feasibility_exit = false;
    SolveResult polished = try_gamma(hi, final_opts);
    const SolveResult& chosen = polished.status == SolveStatus::Feasible ? polished : best;

    const Matrix Pbar = [&] {
        VariableLayout layout;
        layout.p_dim = emb.n_x;
        return layout.unpack(chosen.y);
    }();

    result.outcome = GainResult::Outcome::Certified;
    result.gamma_upper = hi;
    result.certificate.P = storage_from_schur(Pbar, hi);
    result.certificate.gamma = hi;
    result.certificate.region = emb.region;
    result.certificate.grid = emb.points_per_dim;
    result.certificate.min_eigen_margin =
        qsr_margin(emb, SupplyQSR::l2_gain(hi, emb.n_w, emb.n_z), result.certificate.P);
    result.certificate.solver_status = to_string(SolveStatus::Feasible);
    result.certificate.analysis = "li2";
    result.message = "certified";
    return result;
}

CheckResult check_incremental_qsr(const GriddedEmbedding& emb, const SupplyQSR& supply,
                                  const AnalysisOptions& opts, const SdpBackend& backend) {
    supply.validate();
    CheckResult out;
    SolveResult r = solve_feasibility(build_qsr_problem(emb, supply), to_solve_options(opts),
                                      backend);
    out.status = r.status;
    out.message = r.message;
    if (r.status == SolveStatus::Feasible) {
        VariableLayout layout;
        layout.p_dim = emb.n_x;
        out.certificate.P = layout.unpack(r.y);
        out.certificate.region = emb.region;
        out.certificate.grid = emb.points_per_dim;
        out.certificate.min_eigen_margin = r.margin;
        out.certificate.solver_status = to_string(r.status);
        out.certificate.analysis = "qsr";
    }
    return out;
}

CheckResult check_passivity(const GriddedEmbedding& emb, const AnalysisOptions& opts,
                            const SdpBackend& backend) {
    detail::require(emb.n_w == emb.n_z, "check_passivity: requires n_w = n_z");
    CheckResult out;
    SolveResult r = solve_feasibility(build_passivity_problem(emb), to_solve_options(opts),
                                      backend);
    out.status = r.status;
    out.message = r.message;
    if (r.status == SolveStatus::Feasible) {
        VariableLayout layout;
        layout.p_dim = emb.n_x;
        out.certificate.P = layout.unpack(r.y);
        out.certificate.region = emb.region;
        out.certificate.grid = emb.points_per_dim;
        out.certificate.min_eigen_margin = r.margin;
        out.certificate.solver_status = to_string(r.status);
        out.certificate.analysis = "passivity";
    }
    return out;
}

void to_json(nlohmann::json& j, const StorageCertificate& cert) {
    j = nlohmann::json{};
    if (cert.gamma) {
        j["gamma"] = *cert.gamma;
    } else {
        j["gamma"] = nullptr;
    }
    j["n"] = cert.P.rows();
    j["P"] = row_major(cert.P);
    j["region"] = cert.region;
    j["grid"] = cert.grid;
    j["margin"] = cert.min_eigen_margin;
    j["solver_status"] = cert.solver_status;
    j["seed"] = cert.seed;
    j["system"] = cert.system;
    j["analysis"] = cert.analysis;
    if (cert.supply) {
        j["supply"] = *cert.supply;
    }
}

void from_json(const nlohmann::json& j, StorageCertificate& cert) {
    const Index n = j.at("n").get<Index>();
    const auto p = j.at("P").get<std::vector<double>>();
    detail::require(static_cast<Index>(p.size()) == n * n, "StorageCertificate: P size mismatch");
    cert.P.resize(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) cert.P(r, c) = p[static_cast<std::size_t>(r * n + c)];
    if (j.at("gamma").is_null()) {
        cert.gamma.reset();
    } else {
        cert.gamma = j.at("gamma").get<double>();
    }
    cert.region = j.at("region").get<BoxRegion>();
    cert.grid = j.at("grid").get<std::vector<int>>();
    cert.min_eigen_margin = j.at("margin").get<double>();
    cert.solver_status = j.at("solver_status").get<std::string>();
    cert.seed = j.value("seed", std::uint64_t{0});
    cert.system = j.value("system", std::string{});
    cert.analysis = j.value("analysis", std::string{});
    if (j.contains("supply")) {
        cert.supply = j.at("supply").get<SupplyQSR>();
    } else {
        cert.supply.reset();
    }
}

}  // namespace incrcert
