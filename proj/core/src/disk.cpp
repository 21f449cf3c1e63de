#include "incrcert/disk.hpp"

#include <cmath>

namespace incrcert {

void DiskParameters::validate() const {
    detail::require(M > 0 && g > 0 && l > 0 && J > 0 && Km > 0 && tau > 0 && Ts > 0,
                    "DiskParameters: all parameters must be positive");
}

ContinuousTimeSystem unbalanced_disk_ct(const DiskParameters& params) {
    params.validate();
    const double gravity = params.M * params.g * params.l / params.J;
    const double damping = 1.0 / params.tau;
    const double input_gain = params.Km / params.tau;

    ContinuousTimeSystem ct;
    ct.n_x = 2;
    ct.n_u = 1;
    ct.f_c = [gravity, damping, input_gain](const Vector& x, const Vector& u) -> Vector {
        Vector dx(2);
        dx(0) = x(1);
        dx(1) = gravity * std::sin(x(0)) - damping * x(1) + input_gain * u(0);
        return dx;
    };
    ct.jac_c = [gravity, damping, input_gain](const Vector& x,
                                              const Vector&) -> std::pair<Matrix, Matrix> {
        Matrix Jx(2, 2), Ju(2, 1);
        Jx << 0.0, 1.0, gravity * std::cos(x(0)), -damping;
        Ju << 0.0, input_gain;
        return {Jx, Ju};
    };
    return ct;
}

DiscreteTimeSystem discretized_disk(const DiskParameters& params) {
    return rk4_discretize(unbalanced_disk_ct(params), params.Ts);
}

LtiController lti_controller() {
    LtiController c;
    c.n_xc = 1;
    c.n_uc = 2;
    c.B_c = (Matrix(1, 2) << 1.0, 0.0).finished();
    c.C_c = GainSchedule::fixed((RowVector(1) << -0.5).finished());
    c.D_c = GainSchedule::fixed((RowVector(2) << -10.0, -1.0).finished());
    return c;
}

LtiController lpv_controller() {
    LtiController c;
    c.n_xc = 1;
    c.n_uc = 2;
    c.B_c = (Matrix(1, 2) << 1.0, 0.0).finished();
    c.C_c.constant = false;
    c.C_c.value = [](double r1) {
        return (RowVector(1) << -0.5 - std::sin(r1) / 20.0).finished();
    };
    c.C_c.derivative = [](double r1) {
        return (RowVector(1) << -std::cos(r1) / 20.0).finished();
    };
    c.D_c.constant = false;
    c.D_c.value = [](double r1) {
        return (RowVector(2) << -10.0 - 2.0 * std::cos(r1), -1.0).finished();
    };
    c.D_c.derivative = [](double r1) {
        return (RowVector(2) << 2.0 * std::sin(r1), 0.0).finished();
    };
    return c;
}

DiscreteTimeSystem disk_lti_closedloop(const DiskParameters& params) {
    return feedback_interconnect(discretized_disk(params), lti_controller());
}

DiscreteTimeSystem disk_lpv_closedloop(const DiskParameters& params) {
    return feedback_interconnect(discretized_disk(params), lpv_controller());
}

BoxRegion paper_region() {
    BoxRegion r;
    r.intervals = {{-M_PI, M_PI}, {-10.0, 10.0}, {-10.0, 10.0}};
    return r;
}

namespace {

double plant_input(const LtiController& ctrl, const Vector& x, double w) {
    const double r1 = x(0);
    const Vector xp = x.head(2);
    const Vector xc = x.tail(1);
    return (ctrl.C_c.value(r1) * xc + ctrl.D_c.value(r1) * xp).value() + w;
}

}  // namespace

SchedulingMap disk_scheduling_map(const LtiController& ctrl) {
    SchedulingMap map;
    map.n_rho = 3;
    map.selector = [ctrl](const Vector& x, const Vector& w) -> Vector {
        Vector rho(3);
        rho << x(0), x(1), plant_input(ctrl, x, w(0));
        return rho;
    };
    map.lift = [ctrl](const Vector& rho) -> std::pair<Vector, Vector> {
        Vector x(3);
        x << rho(0), rho(1), 0.0;
        Vector w(1);
        w(0) = rho(2) - plant_input(ctrl, x, 0.0);
        return {x, w};
    };
    return map;
}

SchedulingMap disk_scheduling_map_with_xc(const LtiController& ctrl) {
    SchedulingMap map;
    map.n_rho = 4;
    map.selector = [ctrl](const Vector& x, const Vector& w) -> Vector {
        Vector rho(4);
        rho << x(0), x(1), plant_input(ctrl, x, w(0)), x(2);
        return rho;
    };
    map.lift = [ctrl](const Vector& rho) -> std::pair<Vector, Vector> {
        Vector x(3);
        x << rho(0), rho(1), rho(3);
        Vector w(1);
        w(0) = rho(2) - plant_input(ctrl, x, 0.0);
        return {x, w};
    };
    return map;
}

BoxRegion lpv_analysis_region(double xc_bound) {
    detail::require(xc_bound > 0.0, "lpv_analysis_region: xc_bound must be positive");
    BoxRegion r = paper_region();
    r.intervals.emplace_back(-xc_bound, xc_bound);
    return r;
}

PairSamplingOptions disk_pair_sampling() {
    PairSamplingOptions opts;
    opts.horizon = 300;
    opts.input_amplitude = 0.5;
    opts.input_smoothing = 0.9;
    opts.initial_box.intervals = {{-0.7, 0.7}, {-1.5, 1.5}, {-1.0, 1.0}};
    return opts;
}

}  // namespace incrcert
