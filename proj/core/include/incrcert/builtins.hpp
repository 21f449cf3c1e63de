#pragma once

#include <string>
#include <vector>

#include "incrcert/disk.hpp"
#include "incrcert/embedding.hpp"
#include "incrcert/simulation.hpp"

namespace incrcert {

/// A named, self-contained analysis target: system, scheduling map, analysis
/// region, default grid, and a known-good trajectory-pair sampling envelope.
struct BuiltinSystem {
    std::string name;
    DiscreteTimeSystem system;
    SchedulingMap scheduling;
    BoxRegion region;
    std::vector<int> default_grid;
    PairSamplingOptions sampling;
    std::string description;
};

/// Builtins: disk_lti_closedloop, disk_lpv_closedloop, scalar_lti_oracle.
BuiltinSystem make_builtin(const std::string& name);

std::vector<std::string> builtin_names();

}  // namespace incrcert
