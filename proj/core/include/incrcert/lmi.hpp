#pragma once

#include <functional>
#include <string>
#include <vector>

#include "incrcert/embedding.hpp"
#include "incrcert/supply.hpp"
#include "incrcert/types.hpp"

namespace incrcert {

/// Decision-variable layout: one symmetric matrix variable P stored as its
/// upper triangle in row-major vech order (i <= j), optionally followed by
/// named scalar variables.
struct VariableLayout {
    Index p_dim = 0;
    std::vector<std::string> scalars;

    Index num_p_vars() const { return p_dim * (p_dim + 1) / 2; }
    Index num_vars() const { return num_p_vars() + static_cast<Index>(scalars.size()); }

    /// Symmetric basis matrix of the k-th P variable (unit (i,i), or
    /// unit (i,j)+(j,i) for off-diagonal entries).
    Matrix basis(Index k) const;

    /// P assembled from the leading entries of y.
    Matrix unpack(const Vector& y) const;

    /// y from P (and scalar values, when the layout has scalars).
    Vector pack(const Matrix& P, const Vector& scalar_values = Vector()) const;

    /// Indices of the variables that sit on P's diagonal.
    std::vector<Index> diagonal_indices() const;
};

enum class BlockSense { PositiveSemidefinite, NegativeSemidefinite };

/// One affine-in-variables symmetric constraint block, canonicalized to the
/// "required PSD" sense: F0 + sum_j y_j coeff[j] >= 0.
struct LmiBlock {
    Matrix F0;
    std::vector<Matrix> coeff;

    Index dim() const { return F0.rows(); }
    Matrix value_at(const Vector& y) const;
};

/// Semidefinite feasibility problem: find y (i.e. P and scalars) with every
/// block PSD and P positive definite. Blocks added with the
/// NegativeSemidefinite sense are stored negated.
struct LmiProblem {
    VariableLayout layout;
    std::vector<LmiBlock> blocks;

    /// Extracts the affine representation of `expr` by probing it at the
    /// variable basis; `expr` must be affine in (P, scalars) and return a
    /// symmetric matrix of fixed size.
    void add_block(const std::function<Matrix(const Matrix& P, const Vector& scalars)>& expr,
                   BlockSense sense);
};

// Constraint-matrix values (used by tests and margin reporting).

/// Eq.-10-style incremental (Q,S,R) block at a given P; the dissipativity
/// condition is this matrix <= 0.
Matrix incremental_qsr_matrix(const DifferentialMatrices& mats, const SupplyQSR& supply,
                              const Matrix& P);

/// Schur-form incremental l2-gain block at (Pbar, gamma); the gain condition
/// is this matrix >= 0.
Matrix li2_schur_matrix(const DifferentialMatrices& mats, double gamma, const Matrix& Pbar);

/// Incremental passivity block at P; the condition is this matrix >= 0.
/// Requires n_w = n_z.
Matrix passivity_matrix(const DifferentialMatrices& mats, const Matrix& P);

// Affine constraint blocks for a single operating point (variables = vech(P)).
LmiBlock assemble_incremental_qsr(const DifferentialMatrices& mats, const SupplyQSR& supply);
LmiBlock assemble_li2_schur(const DifferentialMatrices& mats, double gamma);
LmiBlock assemble_passivity(const DifferentialMatrices& mats);

// Whole-grid problems with one shared storage variable.
LmiProblem build_qsr_problem(const GriddedEmbedding& emb, const SupplyQSR& supply);
LmiProblem build_li2_problem(const GriddedEmbedding& emb, double gamma);
LmiProblem build_passivity_problem(const GriddedEmbedding& emb);

/// Smallest eigenvalue over all canonical blocks evaluated at y.
double family_min_margin(const LmiProblem& problem, const Vector& y);

}  // namespace incrcert
