#pragma once

#include <functional>
#include <string>
#include <utility>

#include "incrcert/types.hpp"

namespace incrcert {

/// Discrete-time nonlinear system
///   x(k+1) = f(x(k), w(k)),  z(k) = h(x(k), w(k)).
///
/// `jac` is optional; when absent, jacobians() falls back to central finite
/// differences on (f, h).
struct DiscreteTimeSystem {
    Index n_x = 0;
    Index n_w = 0;
    Index n_z = 0;
    std::function<Vector(const Vector&, const Vector&)> f;
    std::function<Vector(const Vector&, const Vector&)> h;
    std::function<DifferentialMatrices(const Vector&, const Vector&)> jac;  // may be empty

    bool has_analytic_jacobian() const { return static_cast<bool>(jac); }
};

/// Continuous-time dynamics xdot = f_c(x, u), used only as input to RK4
/// discretization. `jac_c` optionally supplies (df_c/dx, df_c/du).
struct ContinuousTimeSystem {
    Index n_x = 0;
    Index n_u = 0;
    std::function<Vector(const Vector&, const Vector&)> f_c;
    std::function<std::pair<Matrix, Matrix>(const Vector&, const Vector&)> jac_c;  // may be empty
};

/// Scheduling-dependent controller gain row, e.g. C_c(rho1) of size 1 x n.
/// `derivative` is the elementwise derivative w.r.t. rho1 and is required for
/// exact closed-loop Jacobians when `constant` is false.
struct GainSchedule {
    std::function<RowVector(double)> value;
    std::function<RowVector(double)> derivative;
    bool constant = true;

    static GainSchedule fixed(const RowVector& gain);
};

/// Discrete-time controller with identity state transition:
///   x_c(k+1) = x_c(k) + B_c u_c(k),  y_c(k) = C_c(rho1) x_c(k) + D_c(rho1) u_c(k).
/// The scheduling argument rho1 is the first entry of the controller input.
struct LtiController {
    Index n_xc = 1;
    Index n_uc = 0;
    Matrix B_c;        // n_xc x n_uc
    GainSchedule C_c;  // 1 x n_xc
    GainSchedule D_c;  // 1 x n_uc

    bool is_parameter_varying() const { return !C_c.constant || !D_c.constant; }
};

/// One step of the system: returns (f(x,w), h(x,w)).
std::pair<Vector, Vector> evaluate(const DiscreteTimeSystem& sys, const Vector& x,
                                   const Vector& w);

/// Default finite-difference step: 1e-6 * max(1, |x|_inf).
double default_fd_step(const Vector& x);

/// Central finite differences on (f, h), step per coordinate.
DifferentialMatrices finite_difference_jacobians(const DiscreteTimeSystem& sys, const Vector& x,
                                                 const Vector& w, double fd_step);

/// Analytic Jacobians when available, otherwise central finite differences.
/// Throws EvaluationError if the result contains non-finite entries.
DifferentialMatrices jacobians(const DiscreteTimeSystem& sys, const Vector& x, const Vector& w,
                               double fd_step);
DifferentialMatrices jacobians(const DiscreteTimeSystem& sys, const Vector& x, const Vector& w);

/// Classic fourth-order Runge-Kutta discretization with zero-order hold on the
/// input. The returned system has h = identity on the state (n_z = n_x).
/// When the CT system carries analytic Jacobians, the discrete map does too
/// (chain rule through the four stages).
DiscreteTimeSystem rk4_discretize(const ContinuousTimeSystem& ct, double Ts);

/// Standard negative-feedback loop used throughout:
///   u = y_c + w (disturbance enters at the plant input),
///   u_c = plant state, z = first plant state.
/// Closed-loop state is (x_plant, x_c). Requires a single-input plant whose
/// output map is the identity (as produced by rk4_discretize) and
/// ctrl.n_uc == plant.n_x.
DiscreteTimeSystem feedback_interconnect(const DiscreteTimeSystem& plant,
                                         const LtiController& ctrl);

/// Builds an LTI DiscreteTimeSystem from constant state-space matrices.
DiscreteTimeSystem make_lti_system(const Matrix& A, const Matrix& B, const Matrix& C,
                                   const Matrix& D);

}  // namespace incrcert
