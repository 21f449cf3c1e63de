#pragma once

#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "incrcert/embedding.hpp"
#include "incrcert/supply.hpp"
#include "incrcert/system.hpp"

namespace incrcert {

/// A finite-horizon solution of the system: states x(0..N), inputs w(0..N-1),
/// outputs z(0..N-1). `truncated_at` is set when simulation aborted on a
/// non-finite state (states then end just before the bad step).
struct Trajectory {
    std::vector<Vector> states;
    std::vector<Vector> inputs;
    std::vector<Vector> outputs;
    std::optional<std::size_t> truncated_at;

    std::size_t horizon() const { return inputs.size(); }
};

struct TrajectoryPair {
    Trajectory first;
    Trajectory second;
};

/// Solution of the differential form along a base trajectory: variations
/// dx(0..N) and dz(0..N-1).
struct DifferentialTrajectory {
    std::vector<Vector> dx;
    std::vector<Vector> dz;
};

enum class LongRunClass { Converged, Oscillating, Diverged };

std::string to_string(LongRunClass c);

struct LongRunReport {
    LongRunClass classification = LongRunClass::Converged;
    double peak_to_peak = 0.0;       // max over coordinates, after settle_k
    Vector peak_to_peak_per_state;   // per-coordinate amplitudes after settle_k
};

/// Iterates evaluate() over the input sequence. Deterministic; truncates with
/// a diagnostic on non-finite states.
Trajectory simulate(const DiscreteTimeSystem& sys, const Vector& x0,
                    const std::vector<Vector>& w_seq);

/// Differential form along `base`: dx(k+1) = A(k) dx(k) + B(k) dw(k),
/// dz(k) = C(k) dx(k) + D(k) dw(k), Jacobians evaluated on the base
/// trajectory.
DifferentialTrajectory simulate_differential(const DiscreteTimeSystem& sys, const Trajectory& base,
                                             const Vector& dx0, const std::vector<Vector>& dw_seq);

/// Maximum over k of V(k+1) - V(k) - s(dw(k), dz(k)) with V = dx' P dx.
/// Positive values measure dissipation violation.
double validate_dissipation(const TrajectoryPair& pair, const Matrix& P, const SupplyQSR& supply);

/// Converged when post-settle state steps stay below tol; Diverged when any
/// state norm exceeds 1e6; otherwise Oscillating with the post-settle
/// peak-to-peak amplitude.
LongRunReport classify_longrun(const Trajectory& traj, std::size_t settle_k, double tol);

struct GainLowerBound {
    double value = 0.0;
    int pairs_used = 0;
    int pairs_skipped = 0;  // zero input-difference norm
};

/// max over pairs of |z - z~|_2 / |w - w~|_2 (finite-horizon, compensated
/// summation). Valid lower bound on the incremental l2-gain when the pairs
/// share initial conditions.
GainLowerBound empirical_gain_lower_bound(const DiscreteTimeSystem& sys,
                                          const std::vector<TrajectoryPair>& pairs);

struct PairSamplingOptions {
    std::size_t horizon = 300;
    double input_amplitude = 0.5;
    double input_smoothing = 0.9;  // AR(1) pole of the band-limited inputs
    bool share_initial_state = false;
    int max_attempts_per_pair = 200;
    BoxRegion initial_box;  // sampling box for initial states (system state space)
};

/// Draws trajectory pairs whose scheduling image stays inside `region` for the
/// whole horizon (out-of-region candidates are rejected and resampled).
/// Initial states are uniform in `initial_box`; inputs are clipped band-limited
/// noise. Throws EvaluationError when the rejection budget is exhausted.
std::vector<TrajectoryPair> sample_trajectory_pairs(const DiscreteTimeSystem& sys,
                                                    const SchedulingMap& schedmap,
                                                    const BoxRegion& region, int n_pairs,
                                                    const PairSamplingOptions& opts,
                                                    std::mt19937_64& rng);

/// Band-limited input sequence: AR(1)-smoothed uniform noise scaled to
/// `amplitude`.
std::vector<Vector> bandlimited_inputs(Index n_w, std::size_t horizon, double amplitude,
                                       double smoothing, std::mt19937_64& rng);

/// CSV export, header "k,x1,...,xn,w1,...,wm,z1,...,zp", one row per step
/// (k = 0..N-1), 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace incrcert
