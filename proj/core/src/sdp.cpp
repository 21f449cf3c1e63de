#include "incrcert/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace incrcert {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unsolved: return "unsolved";
    }
    return "unknown";
}

namespace {

// Frobenius inner product <A, B> = tr(A' B).
inline double frob(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// Largest step alpha with M + alpha*dM staying positive definite,
// via the generalized eigenvalue bound on L^-1 dM L^-T.
double max_step(const Matrix& M, const Matrix& dM) {
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) return 0.0;
    const Matrix L = llt.matrixL();
    Matrix K = L.triangularView<Eigen::Lower>().solve(dM);
    K = L.triangularView<Eigen::Lower>().solve(K.transpose()).transpose().eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es((0.5 * (K + K.transpose())).eval(),
                                             Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

struct MarginWorkspace {
    // Margin-extended problem over x = (y, t): slack of block i is
    //   S_i(x) = F0_i + sum_j y_j coeff_ij - t*I.
    const LmiProblem* problem = nullptr;
    Index m = 0;    // number of y variables
    Index nb = 0;   // number of blocks
    Index ntot = 0; // sum of block dimensions

    Matrix slack(const LmiBlock& block, const Vector& x) const {
        Matrix s = block.value_at(x.head(m));
        s.diagonal().array() -= x(m);
        return s;
    }

    bool strictly_feasible_at_zero_margin(const Vector& x) const {
        for (const auto& block : problem->blocks) {
            Matrix v = block.value_at(x.head(m));
            Eigen::LLT<Matrix> llt(v);
            if (llt.info() != Eigen::Success) return false;
        }
        return true;
    }
};

}  // namespace

SolveResult HkmBackend::max_margin(const LmiProblem& problem, const SolveOptions& opts) const {
    SolveResult result;
    const Index m = problem.layout.num_vars();
    detail::require(m > 0, "HkmBackend: problem has no variables");
    detail::require(!problem.blocks.empty(), "HkmBackend: problem has no blocks");
    for (const auto& block : problem.blocks) {
        detail::require(static_cast<Index>(block.coeff.size()) == m,
                        "HkmBackend: block variable count mismatch");
    }

    // Work on a copy extended with bounding blocks: trace(P) <= cap and
    // |scalar_k| <= cap, keeping the margin maximization bounded.
    LmiProblem work = problem;
    {
        const auto diag = work.layout.diagonal_indices();
        LmiBlock cap;
        cap.F0 = Matrix::Constant(1, 1, opts.trace_cap);
        cap.coeff.assign(static_cast<std::size_t>(m), Matrix::Zero(1, 1));
        for (Index j : diag) cap.coeff[static_cast<std::size_t>(j)](0, 0) = -1.0;
        work.blocks.push_back(cap);
        for (Index s = work.layout.num_p_vars(); s < m; ++s) {
            LmiBlock lo, hi;
            lo.F0 = Matrix::Constant(1, 1, opts.trace_cap);
            hi.F0 = Matrix::Constant(1, 1, opts.trace_cap);
            lo.coeff.assign(static_cast<std::size_t>(m), Matrix::Zero(1, 1));
            hi.coeff.assign(static_cast<std::size_t>(m), Matrix::Zero(1, 1));
            lo.coeff[static_cast<std::size_t>(s)](0, 0) = 1.0;
            hi.coeff[static_cast<std::size_t>(s)](0, 0) = -1.0;
            work.blocks.push_back(lo);
            work.blocks.push_back(hi);
        }
    }

    MarginWorkspace ws;
    ws.problem = &work;
    ws.m = m;
    ws.nb = static_cast<Index>(work.blocks.size());
    ws.ntot = 0;
    for (const auto& block : work.blocks) ws.ntot += block.dim();

    // Initial point: P = I (y diagonal entries 1), scalars 0, t below the
    // smallest block eigenvalue.
    Vector x = Vector::Zero(m + 1);
    for (Index j : work.layout.diagonal_indices()) x(j) = 1.0;
    {
        double minlam = std::numeric_limits<double>::infinity();
        for (const auto& block : work.blocks) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(block.value_at(x.head(m)),
                                                     Eigen::EigenvaluesOnly);
            minlam = std::min(minlam, es.eigenvalues().minCoeff());
        }
        if (!std::isfinite(minlam)) {
            result.status = SolveStatus::Unsolved;
            result.message = "non-finite block eigenvalues at the initial point";
            return result;
        }
        x(m) = minlam - 1.0 - 0.1 * std::abs(minlam);
    }

    std::vector<Matrix> S(work.blocks.size());
    std::vector<Matrix> X(work.blocks.size());
    for (std::size_t i = 0; i < work.blocks.size(); ++i) {
        S[i] = ws.slack(work.blocks[i], x);
        X[i] = Matrix::Identity(work.blocks[i].dim(), work.blocks[i].dim()) /
               static_cast<double>(ws.ntot);
    }

    const auto finish_feasible = [&](int iters, bool early) {
        result.status = SolveStatus::Feasible;
        result.y = x.head(m);
        result.margin = family_min_margin(problem, result.y);
        result.max_margin_estimate = x(m);
        result.iterations = iters;
        result.message = early ? "early feasibility exit" : "converged";
        if (result.margin <= 0.0) {
            // posterior check failed; never report an unverified certificate
            result.status = SolveStatus::Unsolved;
            result.message = "solver claimed feasibility but the posterior eigenvalue check "
                             "failed (margin " + std::to_string(result.margin) + ")";
        }
        return result;
    };

    Vector b = Vector::Zero(m + 1);
    b(m) = 1.0;

    std::vector<Matrix> W(work.blocks.size());
    std::vector<std::vector<Matrix>> WC(work.blocks.size()), CX(work.blocks.size());
    std::vector<Matrix> dS_aff(work.blocks.size()), dX_aff(work.blocks.size());
    std::vector<Matrix> dS(work.blocks.size()), dX(work.blocks.size());

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (opts.early_feasibility_exit && ws.strictly_feasible_at_zero_margin(x)) {
            return finish_feasible(it, true);
        }

        double gap = 0.0;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) gap += frob(X[i], S[i]);
        const double mu = gap / static_cast<double>(ws.ntot);
        if (!std::isfinite(gap)) {
            result.status = SolveStatus::Unsolved;
            result.message = "non-finite duality gap at iteration " + std::to_string(it);
            return result;
        }

        // Schur system H dx = rhs, with H_jk = tr(A_j S^-1 A_k X) for the
        // extended variable list (A_j = -coeff_j for y, A_t = +I).
        Matrix H = Matrix::Zero(m + 1, m + 1);
        Vector svec = Vector::Zero(m + 1);
        Vector ax = Vector::Zero(m + 1);  // A(X), for the primal residual
        bool ok = true;
        for (std::size_t i = 0; i < work.blocks.size() && ok; ++i) {
            const auto& block = work.blocks[i];
            Eigen::LLT<Matrix> llt(S[i]);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            W[i] = llt.solve(Matrix::Identity(block.dim(), block.dim()));
            WC[i].resize(static_cast<std::size_t>(m));
            CX[i].resize(static_cast<std::size_t>(m));
            for (Index j = 0; j < m; ++j) {
                WC[i][static_cast<std::size_t>(j)].noalias() =
                    W[i] * block.coeff[static_cast<std::size_t>(j)];
                CX[i][static_cast<std::size_t>(j)].noalias() =
                    block.coeff[static_cast<std::size_t>(j)] * X[i];
            }
            for (Index j = 0; j < m; ++j) {
                const auto& wc = WC[i][static_cast<std::size_t>(j)];
                for (Index k = 0; k < m; ++k) {
                    H(j, k) += frob(wc, CX[i][static_cast<std::size_t>(k)]);
                }
                H(j, m) -= frob(wc, X[i]);
                H(m, j) -= frob(W[i], CX[i][static_cast<std::size_t>(j)]);
                svec(j) -= wc.trace();
                ax(j) -= frob(block.coeff[static_cast<std::size_t>(j)], X[i]);
            }
            H(m, m) += frob(W[i], X[i]);
            svec(m) += W[i].trace();
            ax(m) += X[i].trace();
        }
        if (!ok || !H.allFinite()) {
            result.status = SolveStatus::Unsolved;
            result.message = "slack matrix lost positive definiteness at iteration " +
                             std::to_string(it);
            return result;
        }

        Eigen::FullPivLU<Matrix> lu(H);
        if (!lu.isInvertible()) {
            // nearly converged systems can be numerically singular; fall back
            // to a regularized solve
            const double reg = 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff());
            lu.compute(H + reg * Matrix::Identity(m + 1, m + 1));
        }

        // Predictor (affine scaling direction).
        const Vector dx_aff = lu.solve(b);
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            const auto& block = work.blocks[i];
            Matrix ds = -dx_aff(m) * Matrix::Identity(block.dim(), block.dim());
            for (Index j = 0; j < m; ++j)
                ds.noalias() += dx_aff(j) * block.coeff[static_cast<std::size_t>(j)];
            dS_aff[i] = std::move(ds);
            Matrix z = -X[i] - W[i] * dS_aff[i] * X[i];
            dX_aff[i] = 0.5 * (z + z.transpose());
        }
        double ap = 1.0, ad = 1.0;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            ap = std::min(ap, max_step(X[i], dX_aff[i]));
            ad = std::min(ad, max_step(S[i], dS_aff[i]));
        }
        double gap_aff = 0.0;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            gap_aff += frob(X[i] + std::min(1.0, 0.98 * ap) * dX_aff[i],
                            S[i] + std::min(1.0, 0.98 * ad) * dS_aff[i]);
        }
        double sigma = 0.1;
        if (gap > 0.0) {
            const double ratio = std::max(gap_aff, 0.0) / gap;
            sigma = std::clamp(ratio * ratio * ratio, 1e-6, 1.0);
        }

        // Corrector.
        Vector rhs = b - sigma * mu * svec;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            const auto& block = work.blocks[i];
            const Matrix T = W[i] * dS_aff[i] * dX_aff[i];
            for (Index j = 0; j < m; ++j)
                rhs(j) -= frob(block.coeff[static_cast<std::size_t>(j)], T.transpose());
            rhs(m) += T.trace();
        }
        const Vector dx = lu.solve(rhs);
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            const auto& block = work.blocks[i];
            Matrix ds = -dx(m) * Matrix::Identity(block.dim(), block.dim());
            for (Index j = 0; j < m; ++j)
                ds.noalias() += dx(j) * block.coeff[static_cast<std::size_t>(j)];
            dS[i] = std::move(ds);
            Matrix z = sigma * mu * W[i] - X[i] - W[i] * dS[i] * X[i] - W[i] * dS_aff[i] * dX_aff[i];
            dX[i] = 0.5 * (z + z.transpose());
        }
        ap = 1.0;
        ad = 1.0;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) {
            ap = std::min(ap, 0.98 * max_step(X[i], dX[i]));
            ad = std::min(ad, 0.98 * max_step(S[i], dS[i]));
        }
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);
        if (!(ap > 0.0) || !(ad > 0.0) || !dx.allFinite()) {
            result.status = SolveStatus::Unsolved;
            result.message = "step computation failed at iteration " + std::to_string(it);
            return result;
        }

        for (std::size_t i = 0; i < work.blocks.size(); ++i) X[i] += ap * dX[i];
        x += ad * dx;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) S[i] = ws.slack(work.blocks[i], x);

        double gap_new = 0.0;
        for (std::size_t i = 0; i < work.blocks.size(); ++i) gap_new += frob(X[i], S[i]);
        const double pinf = (b - ax).norm();
        const double scale = std::max(1.0, std::abs(x(m)));
        if (gap_new < opts.gap_tol * scale && pinf < 1e-7 * scale) {
            ++it;
            break;
        }
    }

    // Converged (or ran out of iterations): decide by the exact margin of the
    // final point.
    if (ws.strictly_feasible_at_zero_margin(x)) {
        return finish_feasible(it, false);
    }
    const bool converged = it < opts.max_iterations;
    result.status = converged ? SolveStatus::Infeasible : SolveStatus::Unsolved;
    result.y = x.head(m);
    result.margin = family_min_margin(problem, result.y);
    result.max_margin_estimate = x(m);
    result.iterations = it;
    result.infeasibility_proven = false;
    result.message = converged
                         ? "no feasible point found at tolerance (best margin " +
                               std::to_string(result.max_margin_estimate) + ")"
                         : "iteration limit reached without a verdict";
    return result;
}

const SdpBackend& default_backend() {
    static const HkmBackend backend;
    return backend;
}

SolveResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts,
                              const SdpBackend& backend) {
    detail::require(opts.feas_tol > 0.0, "solve_feasibility: feas_tol must be positive");
    // Shifted problem: blocks get a +tol*I slack, and P must clear tol*I.
    LmiProblem shifted = problem;
    for (auto& block : shifted.blocks) {
        block.F0.diagonal().array() += opts.feas_tol;
    }
    {
        const Index n = shifted.layout.p_dim;
        LmiBlock pd;
        pd.F0 = -opts.feas_tol * Matrix::Identity(n, n);
        pd.coeff.reserve(static_cast<std::size_t>(shifted.layout.num_vars()));
        for (Index k = 0; k < shifted.layout.num_p_vars(); ++k)
            pd.coeff.push_back(shifted.layout.basis(k));
        for (Index s = shifted.layout.num_p_vars(); s < shifted.layout.num_vars(); ++s)
            pd.coeff.push_back(Matrix::Zero(n, n));
        shifted.blocks.push_back(std::move(pd));
    }

    SolveResult r = backend.max_margin(shifted, opts);
    if (r.status == SolveStatus::Feasible) {
        // Report margins of the unshifted constraints.
        r.margin = family_min_margin(problem, r.y);
        if (r.margin < -opts.feas_tol) {
            r.status = SolveStatus::Unsolved;
            r.message = "posterior margin check failed after tolerance shift";
        }
    }
    return r;
}

}  // namespace incrcert
