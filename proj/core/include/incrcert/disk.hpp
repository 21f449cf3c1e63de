#pragma once

#include "incrcert/embedding.hpp"
#include "incrcert/simulation.hpp"
#include "incrcert/system.hpp"

namespace incrcert {

/// Physical parameters of the unbalanced disk and the sample time.
struct DiskParameters {
    double M = 0.076;    // kg
    double g = 9.8;      // m/s^2
    double l = 0.041;    // m
    double J = 2.4e-4;   // kg m^2
    double Km = 11.0;    // motor constant
    double tau = 0.40;   // s
    double Ts = 1.0 / 20.0;  // s

    void validate() const;
};

/// CT dynamics: x1dot = x2, x2dot = (Mgl/J) sin(x1) - x2/tau + (Km/tau) u.
/// Carries analytic Jacobians.
ContinuousTimeSystem unbalanced_disk_ct(const DiskParameters& params = {});

/// RK4 discretization of the disk at params.Ts.
DiscreteTimeSystem discretized_disk(const DiskParameters& params = {});

/// PID-like controller: B_c = [1 0], C_c = -0.5, D_c = [-10 -1].
LtiController lti_controller();

/// Gain-scheduled variant: C_c(r1) = -0.5 - sin(r1)/20,
/// D_c(r1) = [-10 - 2 cos(r1), -1], scheduled by r1 = x1.
LtiController lpv_controller();

DiscreteTimeSystem disk_lti_closedloop(const DiskParameters& params = {});
DiscreteTimeSystem disk_lpv_closedloop(const DiskParameters& params = {});

/// Analysis box x1 in [-pi, pi], x2 in [-10, 10], u in [-10, 10].
BoxRegion paper_region();

/// Scheduling by (x1, x2, u) with the controller state lifted to zero. Exact
/// for the constant-gain loop, whose Jacobians do not depend on x_c.
SchedulingMap disk_scheduling_map(const LtiController& ctrl);

/// Scheduling by (x1, x2, u, x_c). The gain-scheduled loop's Jacobians carry
/// the gain-derivative term C_c'(x1) x_c, so the controller state must be a
/// scheduling coordinate; its range covers the disturbance-rejection
/// envelope (x_c reaches about -140 while holding off a -70 input offset).
SchedulingMap disk_scheduling_map_with_xc(const LtiController& ctrl);

/// paper_region() extended by x_c in [-xc_bound, xc_bound].
BoxRegion lpv_analysis_region(double xc_bound = 150.0);

/// Known-good sampling envelope for in-region trajectory pairs of either
/// closed loop.
PairSamplingOptions disk_pair_sampling();

}  // namespace incrcert
