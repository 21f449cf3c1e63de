#pragma once

#include <Eigen/Dense>
#include <sstream>
#include <stdexcept>
#include <string>

namespace incrcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Thrown when a caller violates an operation's preconditions.
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a system map or Jacobian produces non-finite values.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractViolation(message);
}

inline std::string format_point(const Vector& x, const Vector& w) {
    std::ostringstream os;
    os << "x=[" << x.transpose() << "], w=[" << w.transpose() << "]";
    return os.str();
}

}  // namespace detail

/// Jacobians of (f, h) at one operating point: A = df/dx, B = df/dw, C = dh/dx, D = dh/dw.
struct DifferentialMatrices {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;

    bool all_finite() const {
        return A.allFinite() && B.allFinite() && C.allFinite() && D.allFinite();
    }
};

}  // namespace incrcert
