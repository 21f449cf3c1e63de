#include "incrcert/lmi.hpp"

#include <Eigen/Eigenvalues>

namespace incrcert {

Matrix VariableLayout::basis(Index k) const {
    detail::require(k >= 0 && k < num_p_vars(), "VariableLayout::basis: index out of range");
    Matrix E = Matrix::Zero(p_dim, p_dim);
    Index flat = 0;
    for (Index i = 0; i < p_dim; ++i) {
        for (Index j = i; j < p_dim; ++j, ++flat) {
            if (flat == k) {
                E(i, j) = 1.0;
                E(j, i) = 1.0;
                return E;
            }
        }
    }
    return E;  // unreachable
}

Matrix VariableLayout::unpack(const Vector& y) const {
    detail::require(y.size() >= num_p_vars(), "VariableLayout::unpack: y too short");
    Matrix P(p_dim, p_dim);
    Index flat = 0;
    for (Index i = 0; i < p_dim; ++i) {
        for (Index j = i; j < p_dim; ++j, ++flat) {
            P(i, j) = y(flat);
            P(j, i) = y(flat);
        }
    }
    return P;
}

Vector VariableLayout::pack(const Matrix& P, const Vector& scalar_values) const {
    detail::require(P.rows() == p_dim && P.cols() == p_dim,
                    "VariableLayout::pack: P has wrong shape");
    detail::require(scalar_values.size() == static_cast<Index>(scalars.size()),
                    "VariableLayout::pack: scalar count mismatch");
    Vector y(num_vars());
    Index flat = 0;
    for (Index i = 0; i < p_dim; ++i)
        for (Index j = i; j < p_dim; ++j, ++flat) y(flat) = P(i, j);
    for (Index s = 0; s < scalar_values.size(); ++s) y(num_p_vars() + s) = scalar_values(s);
    return y;
}

std::vector<Index> VariableLayout::diagonal_indices() const {
    std::vector<Index> out;
    Index flat = 0;
    for (Index i = 0; i < p_dim; ++i) {
        for (Index j = i; j < p_dim; ++j, ++flat) {
            if (i == j) out.push_back(flat);
        }
    }
    return out;
}

Matrix LmiBlock::value_at(const Vector& y) const {
    detail::require(y.size() == static_cast<Index>(coeff.size()),
                    "LmiBlock::value_at: variable count mismatch");
    Matrix v = F0;
    for (std::size_t j = 0; j < coeff.size(); ++j) v += y(static_cast<Index>(j)) * coeff[j];
    return v;
}

void LmiProblem::add_block(
    const std::function<Matrix(const Matrix& P, const Vector& scalars)>& expr, BlockSense sense) {
    const Index np = layout.num_p_vars();
    const Index ns = static_cast<Index>(layout.scalars.size());
    const Matrix P0 = Matrix::Zero(layout.p_dim, layout.p_dim);
    const Vector s0 = Vector::Zero(ns);

    LmiBlock block;
    block.F0 = expr(P0, s0);
    detail::require(block.F0.rows() == block.F0.cols(), "LmiProblem::add_block: block not square");
    block.coeff.reserve(static_cast<std::size_t>(np + ns));
    for (Index k = 0; k < np; ++k) {
        block.coeff.push_back(expr(layout.basis(k), s0) - block.F0);
    }
    for (Index s = 0; s < ns; ++s) {
        Vector sv = s0;
        sv(s) = 1.0;
        block.coeff.push_back(expr(P0, sv) - block.F0);
    }
    if (sense == BlockSense::NegativeSemidefinite) {
        block.F0 = (-block.F0).eval();
        for (auto& c : block.coeff) c = (-c).eval();
    }
    // enforce exact symmetry against rounding in the caller's expression
    block.F0 = (0.5 * (block.F0 + block.F0.transpose())).eval();
    for (auto& c : block.coeff) c = (0.5 * (c + c.transpose())).eval();
    blocks.push_back(std::move(block));
}

Matrix incremental_qsr_matrix(const DifferentialMatrices& mats, const SupplyQSR& supply,
                              const Matrix& P) {
    const Index nx = mats.A.rows();
    const Index nw = mats.B.cols();
    const Index nz = mats.C.rows();
    detail::require(supply.n_w() == nw && supply.n_z() == nz,
                    "incremental_qsr_matrix: supply dimensions do not match the system");
    detail::require(P.rows() == nx && P.cols() == nx, "incremental_qsr_matrix: P has wrong shape");

    Matrix V(nx, nx + nw);  // [A B]
    V.leftCols(nx) = mats.A;
    V.rightCols(nw) = mats.B;
    Matrix W(nz + nw, nx + nw);  // [0 I; C D]
    W.setZero();
    W.topRightCorner(nw, nw) = Matrix::Identity(nw, nw);
    W.bottomLeftCorner(nz, nx) = mats.C;
    W.bottomRightCorner(nz, nw) = mats.D;
    Matrix supply_mat(nw + nz, nw + nz);
    supply_mat.topLeftCorner(nw, nw) = supply.Q;
    supply_mat.topRightCorner(nw, nz) = supply.S;
    supply_mat.bottomLeftCorner(nz, nw) = supply.S.transpose();
    supply_mat.bottomRightCorner(nz, nz) = supply.R;

    Matrix block = V.transpose() * P * V - W.transpose() * supply_mat * W;
    block.topLeftCorner(nx, nx) -= P;
    return (0.5 * (block + block.transpose())).eval();
}

Matrix li2_schur_matrix(const DifferentialMatrices& mats, double gamma, const Matrix& Pbar) {
    detail::require(gamma > 0.0, "li2_schur_matrix: gamma must be positive");
    const Index nx = mats.A.rows();
    const Index nw = mats.B.cols();
    const Index nz = mats.C.rows();
    detail::require(Pbar.rows() == nx && Pbar.cols() == nx, "li2_schur_matrix: Pbar wrong shape");

    const Index n = 2 * nx + nw + nz;
    Matrix M = Matrix::Zero(n, n);
    M.block(0, 0, nx, nx) = Pbar;
    M.block(0, nx, nx, nx) = mats.A * Pbar;
    M.block(0, 2 * nx, nx, nw) = mats.B;
    M.block(nx, 0, nx, nx) = Pbar * mats.A.transpose();
    M.block(nx, nx, nx, nx) = Pbar;
    M.block(nx, 2 * nx + nw, nx, nz) = Pbar * mats.C.transpose();
    M.block(2 * nx, 0, nw, nx) = mats.B.transpose();
    M.block(2 * nx, 2 * nx, nw, nw) = gamma * Matrix::Identity(nw, nw);
    M.block(2 * nx, 2 * nx + nw, nw, nz) = mats.D.transpose();
    M.block(2 * nx + nw, nx, nz, nx) = mats.C * Pbar;
    M.block(2 * nx + nw, 2 * nx, nz, nw) = mats.D;
    M.block(2 * nx + nw, 2 * nx + nw, nz, nz) = gamma * Matrix::Identity(nz, nz);
    return M;
}

Matrix passivity_matrix(const DifferentialMatrices& mats, const Matrix& P) {
    const Index nx = mats.A.rows();
    const Index nw = mats.B.cols();
    const Index nz = mats.C.rows();
    detail::require(nw == nz, "passivity_matrix: requires n_w = n_z");
    detail::require(P.rows() == nx && P.cols() == nx, "passivity_matrix: P has wrong shape");

    const Index n = 2 * nx + nw;
    Matrix M = Matrix::Zero(n, n);
    M.block(0, 0, nx, nx) = P;
    M.block(0, nx, nx, nx) = mats.A.transpose() * P;
    M.block(0, 2 * nx, nx, nz) = mats.C.transpose();
    M.block(nx, 0, nx, nx) = P * mats.A;
    M.block(nx, nx, nx, nx) = P;
    M.block(nx, 2 * nx, nx, nw) = P * mats.B;
    M.block(2 * nx, 0, nz, nx) = mats.C;
    M.block(2 * nx, nx, nw, nx) = mats.B.transpose() * P;
    M.block(2 * nx, 2 * nx, nw, nw) = mats.D + mats.D.transpose();
    return M;
}

namespace {

VariableLayout storage_layout(Index p_dim) {
    VariableLayout layout;
    layout.p_dim = p_dim;
    return layout;
}

}  // namespace

LmiBlock assemble_incremental_qsr(const DifferentialMatrices& mats, const SupplyQSR& supply) {
    supply.validate();
    LmiProblem tmp;
    tmp.layout = storage_layout(mats.A.rows());
    tmp.add_block([&](const Matrix& P, const Vector&) { return incremental_qsr_matrix(mats, supply, P); },
                  BlockSense::NegativeSemidefinite);
    return tmp.blocks.front();
}

LmiBlock assemble_li2_schur(const DifferentialMatrices& mats, double gamma) {
    LmiProblem tmp;
    tmp.layout = storage_layout(mats.A.rows());
    tmp.add_block([&](const Matrix& Pbar, const Vector&) { return li2_schur_matrix(mats, gamma, Pbar); },
                  BlockSense::PositiveSemidefinite);
    return tmp.blocks.front();
}

LmiBlock assemble_passivity(const DifferentialMatrices& mats) {
    LmiProblem tmp;
    tmp.layout = storage_layout(mats.A.rows());
    tmp.add_block([&](const Matrix& P, const Vector&) { return passivity_matrix(mats, P); },
                  BlockSense::PositiveSemidefinite);
    return tmp.blocks.front();
}

LmiProblem build_qsr_problem(const GriddedEmbedding& emb, const SupplyQSR& supply) {
    supply.validate();
    detail::require(!emb.matrices.empty(), "build_qsr_problem: empty embedding");
    LmiProblem problem;
    problem.layout = storage_layout(emb.n_x);
    problem.blocks.reserve(emb.matrices.size());
    for (const auto& mats : emb.matrices) problem.blocks.push_back(assemble_incremental_qsr(mats, supply));
    return problem;
}

LmiProblem build_li2_problem(const GriddedEmbedding& emb, double gamma) {
    detail::require(!emb.matrices.empty(), "build_li2_problem: empty embedding");
    LmiProblem problem;
    problem.layout = storage_layout(emb.n_x);
    problem.blocks.reserve(emb.matrices.size());
    for (const auto& mats : emb.matrices) problem.blocks.push_back(assemble_li2_schur(mats, gamma));
    return problem;
}

LmiProblem build_passivity_problem(const GriddedEmbedding& emb) {
    detail::require(!emb.matrices.empty(), "build_passivity_problem: empty embedding");
    detail::require(emb.n_w == emb.n_z, "build_passivity_problem: requires n_w = n_z");
    LmiProblem problem;
    problem.layout = storage_layout(emb.n_x);
    problem.blocks.reserve(emb.matrices.size());
    for (const auto& mats : emb.matrices) problem.blocks.push_back(assemble_passivity(mats));
    return problem;
}

double family_min_margin(const LmiProblem& problem, const Vector& y) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& block : problem.blocks) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(block.value_at(y), Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues().minCoeff());
    }
    return margin;
}

}  // namespace incrcert
