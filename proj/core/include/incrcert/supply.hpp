#pragma once

#include "incrcert/types.hpp"

namespace incrcert {

/// Quadratic supply function on signal differences,
///   s = [dw; dz]' [Q S; S' R] [dw; dz],
/// with Q (n_w x n_w) and R (n_z x n_z) symmetric. The dissipativity LMI
/// additionally requires R to be negative definite or exactly zero.
struct SupplyQSR {
    Matrix Q;
    Matrix S;
    Matrix R;

    Index n_w() const { return Q.rows(); }
    Index n_z() const { return R.rows(); }

    /// Supply value at a difference pair.
    double evaluate(const Vector& dw, const Vector& dz) const;

    /// Checks symmetry of Q and R (to 1e-12 relative) and the R-definiteness
    /// hypothesis (R negative definite or R = 0, by eigenvalues).
    void validate() const;

    /// Incremental l2-gain supply: Q = gamma^2 I, S = 0, R = -I.
    static SupplyQSR l2_gain(double gamma, Index n_w, Index n_z);

    /// Incremental passivity supply: s = dw'dz + dz'dw, i.e. Q = 0, S = I, R = 0.
    /// (Requires n_w = n_z.)
    static SupplyQSR passivity(Index n);
};

}  // namespace incrcert
