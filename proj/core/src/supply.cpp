#include "incrcert/supply.hpp"

#include <Eigen/Eigenvalues>

namespace incrcert {

double SupplyQSR::evaluate(const Vector& dw, const Vector& dz) const {
    detail::require(dw.size() == n_w() && dz.size() == n_z(),
                    "SupplyQSR::evaluate: dimension mismatch");
    return (dw.dot(Q * dw) + 2.0 * dw.dot(S * dz) + dz.dot(R * dz));
}

void SupplyQSR::validate() const {
    detail::require(Q.rows() == Q.cols(), "SupplyQSR: Q must be square");
    detail::require(R.rows() == R.cols(), "SupplyQSR: R must be square");
    detail::require(S.rows() == Q.rows() && S.cols() == R.rows(),
                    "SupplyQSR: S must be n_w x n_z");
    const double qscale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    const double rscale = std::max(1.0, R.cwiseAbs().maxCoeff());
    detail::require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * qscale,
                    "SupplyQSR: Q is not symmetric");
    detail::require((R - R.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * rscale,
                    "SupplyQSR: R is not symmetric");
    if (R.size() == 0) return;
    if (R.cwiseAbs().maxCoeff() == 0.0) return;  // R = 0 branch
    Eigen::SelfAdjointEigenSolver<Matrix> es(R, Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().maxCoeff() < -1e-12 * rscale,
                    "SupplyQSR: R must be negative definite or zero");
}

SupplyQSR SupplyQSR::l2_gain(double gamma, Index n_w, Index n_z) {
    detail::require(gamma >= 0.0, "SupplyQSR::l2_gain: gamma must be nonnegative");
    SupplyQSR s;
    s.Q = gamma * gamma * Matrix::Identity(n_w, n_w);
    s.S = Matrix::Zero(n_w, n_z);
    s.R = -Matrix::Identity(n_z, n_z);
    return s;
}

SupplyQSR SupplyQSR::passivity(Index n) {
    SupplyQSR s;
    s.Q = Matrix::Zero(n, n);
    s.S = Matrix::Identity(n, n);
    s.R = Matrix::Zero(n, n);
    return s;
}

}  // namespace incrcert
