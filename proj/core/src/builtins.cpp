#include "incrcert/builtins.hpp"

namespace incrcert {

namespace {

BuiltinSystem disk_lti_builtin() {
    BuiltinSystem b;
    b.name = "disk_lti_closedloop";
    b.system = disk_lti_closedloop();
    b.scheduling = disk_scheduling_map(lti_controller());
    b.region = paper_region();
    b.default_grid = {11, 11, 11};
    b.sampling = disk_pair_sampling();
    b.description = "RK4-discretized unbalanced disk in feedback with the constant-gain "
                    "controller; scheduling (x1, x2, u)";
    return b;
}

BuiltinSystem disk_lpv_builtin() {
    BuiltinSystem b;
    b.name = "disk_lpv_closedloop";
    b.system = disk_lpv_closedloop();
    b.scheduling = disk_scheduling_map_with_xc(lpv_controller());
    b.region = lpv_analysis_region();
    // A_delta is affine in x_c, so endpoints plus the center suffice in that
    // coordinate for the Schur-form family.
    b.default_grid = {11, 11, 11, 3};
    b.sampling = disk_pair_sampling();
    b.description = "RK4-discretized unbalanced disk in feedback with the gain-scheduled "
                    "controller; scheduling (x1, x2, u, x_c)";
    return b;
}

BuiltinSystem scalar_lti_builtin() {
    BuiltinSystem b;
    b.name = "scalar_lti_oracle";
    b.system = make_lti_system((Matrix(1, 1) << 0.5).finished(), (Matrix(1, 1) << 1.0).finished(),
                               (Matrix(1, 1) << 1.0).finished(), (Matrix(1, 1) << 0.0).finished());
    b.scheduling.n_rho = 1;
    b.scheduling.selector = [](const Vector& x, const Vector&) -> Vector { return x.head(1); };
    b.scheduling.lift = [](const Vector& rho) -> std::pair<Vector, Vector> {
        Vector x(1), w(1);
        x << rho(0);
        w << 0.0;
        return {x, w};
    };
    b.region.intervals = {{-1.0, 1.0}};
    b.default_grid = {1};
    b.sampling.horizon = 200;
    b.sampling.input_amplitude = 1.0;
    b.sampling.input_smoothing = 0.5;
    b.sampling.initial_box.intervals = {{-1.0, 1.0}};
    b.description = "scalar system x+ = 0.5 x + w, z = x; H-infinity norm 2.0";
    return b;
}

}  // namespace

BuiltinSystem make_builtin(const std::string& name) {
    if (name == "disk_lti_closedloop") return disk_lti_builtin();
    if (name == "disk_lpv_closedloop") return disk_lpv_builtin();
    if (name == "scalar_lti_oracle") return scalar_lti_builtin();
    throw ContractViolation("unknown builtin system '" + name + "'; available: " +
                            [] {
                                std::string s;
                                for (const auto& n : builtin_names()) {
                                    if (!s.empty()) s += ", ";
                                    s += n;
                                }
                                return s;
                            }());
}

std::vector<std::string> builtin_names() {
    return {"disk_lti_closedloop", "disk_lpv_closedloop", "scalar_lti_oracle"};
}

}  // namespace incrcert
