#include "incrcert/system.hpp"

#include <cmath>

namespace incrcert {

GainSchedule GainSchedule::fixed(const RowVector& gain) {
    GainSchedule g;
    g.value = [gain](double) { return gain; };
    g.derivative = [n = gain.cols()](double) { return RowVector::Zero(n).eval(); };
    g.constant = true;
    return g;
}

std::pair<Vector, Vector> evaluate(const DiscreteTimeSystem& sys, const Vector& x,
                                   const Vector& w) {
    detail::require(x.size() == sys.n_x, "evaluate: state has size " + std::to_string(x.size()) +
                                             ", expected n_x=" + std::to_string(sys.n_x));
    detail::require(w.size() == sys.n_w, "evaluate: input has size " + std::to_string(w.size()) +
                                             ", expected n_w=" + std::to_string(sys.n_w));
    Vector xn = sys.f(x, w);
    Vector z = sys.h(x, w);
    detail::require(xn.size() == sys.n_x, "evaluate: f returned wrong dimension");
    detail::require(z.size() == sys.n_z, "evaluate: h returned wrong dimension");
    return {std::move(xn), std::move(z)};
}

double default_fd_step(const Vector& x) {
    const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    return 1e-6 * std::max(1.0, scale);
}

DifferentialMatrices finite_difference_jacobians(const DiscreteTimeSystem& sys, const Vector& x,
                                                 const Vector& w, double fd_step) {
    detail::require(fd_step > 0.0, "finite_difference_jacobians: fd_step must be positive");
    detail::require(x.size() == sys.n_x && w.size() == sys.n_w,
                    "finite_difference_jacobians: dimension mismatch");
    DifferentialMatrices m;
    m.A.resize(sys.n_x, sys.n_x);
    m.B.resize(sys.n_x, sys.n_w);
    m.C.resize(sys.n_z, sys.n_x);
    m.D.resize(sys.n_z, sys.n_w);

    Vector xp = x, xm = x, wp = w, wm = w;
    for (Index j = 0; j < sys.n_x; ++j) {
        xp(j) += fd_step;
        xm(j) -= fd_step;
        m.A.col(j) = (sys.f(xp, w) - sys.f(xm, w)) / (2.0 * fd_step);
        m.C.col(j) = (sys.h(xp, w) - sys.h(xm, w)) / (2.0 * fd_step);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    for (Index j = 0; j < sys.n_w; ++j) {
        wp(j) += fd_step;
        wm(j) -= fd_step;
        m.B.col(j) = (sys.f(x, wp) - sys.f(x, wm)) / (2.0 * fd_step);
        m.D.col(j) = (sys.h(x, wp) - sys.h(x, wm)) / (2.0 * fd_step);
        wp(j) = w(j);
        wm(j) = w(j);
    }
    return m;
}

DifferentialMatrices jacobians(const DiscreteTimeSystem& sys, const Vector& x, const Vector& w,
                               double fd_step) {
    DifferentialMatrices m =
        sys.jac ? sys.jac(x, w) : finite_difference_jacobians(sys, x, w, fd_step);
    if (!m.all_finite()) {
        throw EvaluationError("jacobians: non-finite entries at " + detail::format_point(x, w));
    }
    return m;
}

DifferentialMatrices jacobians(const DiscreteTimeSystem& sys, const Vector& x, const Vector& w) {
    return jacobians(sys, x, w, default_fd_step(x));
}

DiscreteTimeSystem rk4_discretize(const ContinuousTimeSystem& ct, double Ts) {
    detail::require(Ts > 0.0, "rk4_discretize: Ts must be positive");
    detail::require(static_cast<bool>(ct.f_c), "rk4_discretize: f_c is not set");

    DiscreteTimeSystem sys;
    sys.n_x = ct.n_x;
    sys.n_w = ct.n_u;
    sys.n_z = ct.n_x;

    auto fc = ct.f_c;
    sys.f = [fc, Ts](const Vector& x, const Vector& u) -> Vector {
        const Vector p1 = fc(x, u);
        const Vector p2 = fc(x + 0.5 * Ts * p1, u);
        const Vector p3 = fc(x + 0.5 * Ts * p2, u);
        const Vector p4 = fc(x + Ts * p3, u);
        return x + (Ts / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    };
    sys.h = [](const Vector& x, const Vector&) -> Vector { return x; };

    if (ct.jac_c) {
        auto jc = ct.jac_c;
        const Index nx = ct.n_x;
        const Index nu = ct.n_u;
        sys.jac = [fc, jc, Ts, nx, nu](const Vector& x, const Vector& u) -> DifferentialMatrices {
            const Vector p1 = fc(x, u);
            const Vector x2 = x + 0.5 * Ts * p1;
            const Vector p2 = fc(x2, u);
            const Vector x3 = x + 0.5 * Ts * p2;
            const Vector p3 = fc(x3, u);
            const Vector x4 = x + Ts * p3;

            const auto [J1x, J1u] = jc(x, u);
            const auto [J2x, J2u] = jc(x2, u);
            const auto [J3x, J3u] = jc(x3, u);
            const auto [J4x, J4u] = jc(x4, u);

            const Matrix I = Matrix::Identity(nx, nx);
            const Matrix D1x = J1x;
            const Matrix D1u = J1u;
            const Matrix D2x = J2x * (I + 0.5 * Ts * D1x);
            const Matrix D2u = J2x * (0.5 * Ts * D1u) + J2u;
            const Matrix D3x = J3x * (I + 0.5 * Ts * D2x);
            const Matrix D3u = J3x * (0.5 * Ts * D2u) + J3u;
            const Matrix D4x = J4x * (I + Ts * D3x);
            const Matrix D4u = J4x * (Ts * D3u) + J4u;

            DifferentialMatrices m;
            m.A = I + (Ts / 6.0) * (D1x + 2.0 * D2x + 2.0 * D3x + D4x);
            m.B = (Ts / 6.0) * (D1u + 2.0 * D2u + 2.0 * D3u + D4u);
            m.C = Matrix::Identity(nx, nx);
            m.D = Matrix::Zero(nx, nu);
            return m;
        };
    }
    return sys;
}

DiscreteTimeSystem feedback_interconnect(const DiscreteTimeSystem& plant,
                                         const LtiController& ctrl) {
    detail::require(ctrl.n_uc == plant.n_x,
                    "feedback_interconnect: controller input dimension must equal plant state "
                    "dimension");
    detail::require(plant.n_w == 1, "feedback_interconnect: plant must have a single input");
    detail::require(ctrl.B_c.rows() == ctrl.n_xc && ctrl.B_c.cols() == ctrl.n_uc,
                    "feedback_interconnect: B_c has wrong shape");
    detail::require(static_cast<bool>(ctrl.C_c.value) && static_cast<bool>(ctrl.D_c.value),
                    "feedback_interconnect: controller gain maps are not set");

    const Index np = plant.n_x;
    const Index nc = ctrl.n_xc;

    DiscreteTimeSystem cl;
    cl.n_x = np + nc;
    cl.n_w = 1;
    cl.n_z = 1;

    auto controller_output = [ctrl, np](const Vector& x) -> double {
        const double rho1 = x(0);
        const Vector xp = x.head(np);
        const Vector xc = x.tail(ctrl.n_xc);
        return (ctrl.C_c.value(rho1) * xc + ctrl.D_c.value(rho1) * xp).value();
    };

    cl.f = [plant, ctrl, np, nc, controller_output](const Vector& x, const Vector& w) -> Vector {
        const Vector xp = x.head(np);
        const Vector xc = x.tail(nc);
        Vector u(1);
        u(0) = controller_output(x) + w(0);
        Vector out(np + nc);
        out.head(np) = plant.f(xp, u);
        out.tail(nc) = xc + ctrl.B_c * xp;
        return out;
    };
    cl.h = [](const Vector& x, const Vector&) -> Vector { return x.head(1); };

    if (plant.has_analytic_jacobian()) {
        detail::require(static_cast<bool>(ctrl.C_c.derivative) &&
                            static_cast<bool>(ctrl.D_c.derivative),
                        "feedback_interconnect: gain derivatives required for analytic Jacobians");
        cl.jac = [plant, ctrl, np, nc, controller_output](const Vector& x,
                                                          const Vector& w) -> DifferentialMatrices {
            const double rho1 = x(0);
            const Vector xp = x.head(np);
            const Vector xc = x.tail(nc);
            Vector u(1);
            u(0) = controller_output(x) + w(0);

            const DifferentialMatrices pj = plant.jac(xp, u);
            const Matrix& Ap = pj.A;  // np x np
            const Matrix& Bp = pj.B;  // np x 1

            // du/dx: gains plus the chain-rule term from rho1 = x1.
            RowVector du_dxp = ctrl.D_c.value(rho1);
            du_dxp(0) += (ctrl.C_c.derivative(rho1) * xc).value() +
                         (ctrl.D_c.derivative(rho1) * xp).value();
            const RowVector du_dxc = ctrl.C_c.value(rho1);

            DifferentialMatrices m;
            m.A.setZero(np + nc, np + nc);
            m.A.topLeftCorner(np, np) = Ap + Bp * du_dxp;
            m.A.topRightCorner(np, nc) = Bp * du_dxc;
            m.A.bottomLeftCorner(nc, np) = ctrl.B_c;
            m.A.bottomRightCorner(nc, nc) = Matrix::Identity(nc, nc);
            m.B.setZero(np + nc, 1);
            m.B.topRows(np) = Bp;
            m.C.setZero(1, np + nc);
            m.C(0, 0) = 1.0;
            m.D = Matrix::Zero(1, 1);
            return m;
        };
    }
    return cl;
}

DiscreteTimeSystem make_lti_system(const Matrix& A, const Matrix& B, const Matrix& C,
                                   const Matrix& D) {
    detail::require(A.rows() == A.cols(), "make_lti_system: A must be square");
    detail::require(B.rows() == A.rows(), "make_lti_system: B row count mismatch");
    detail::require(C.cols() == A.cols(), "make_lti_system: C column count mismatch");
    detail::require(D.rows() == C.rows() && D.cols() == B.cols(),
                    "make_lti_system: D shape mismatch");
    DiscreteTimeSystem sys;
    sys.n_x = A.rows();
    sys.n_w = B.cols();
    sys.n_z = C.rows();
    sys.f = [A, B](const Vector& x, const Vector& w) -> Vector { return A * x + B * w; };
    sys.h = [C, D](const Vector& x, const Vector& w) -> Vector { return C * x + D * w; };
    sys.jac = [A, B, C, D](const Vector&, const Vector&) -> DifferentialMatrices {
        return DifferentialMatrices{A, B, C, D};
    };
    return sys;
}

}  // namespace incrcert
