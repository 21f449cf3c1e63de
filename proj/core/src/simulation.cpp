#include "incrcert/simulation.hpp"

#include <cmath>
#include <cstdio>

namespace incrcert {

namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void write_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

std::string to_string(LongRunClass c) {
    switch (c) {
        case LongRunClass::Converged: return "converged";
        case LongRunClass::Oscillating: return "oscillating";
        case LongRunClass::Diverged: return "diverged";
    }
    return "unknown";
}

Trajectory simulate(const DiscreteTimeSystem& sys, const Vector& x0,
                    const std::vector<Vector>& w_seq) {
    detail::require(x0.size() == sys.n_x, "simulate: x0 dimension mismatch");
    Trajectory traj;
    traj.states.reserve(w_seq.size() + 1);
    traj.inputs.reserve(w_seq.size());
    traj.outputs.reserve(w_seq.size());
    traj.states.push_back(x0);
    for (std::size_t k = 0; k < w_seq.size(); ++k) {
        auto [xn, z] = evaluate(sys, traj.states.back(), w_seq[k]);
        if (!xn.allFinite() || !z.allFinite()) {
            traj.truncated_at = k;
            break;
        }
        traj.inputs.push_back(w_seq[k]);
        traj.outputs.push_back(std::move(z));
        traj.states.push_back(std::move(xn));
    }
    return traj;
}

DifferentialTrajectory simulate_differential(const DiscreteTimeSystem& sys, const Trajectory& base,
                                             const Vector& dx0,
                                             const std::vector<Vector>& dw_seq) {
    detail::require(dx0.size() == sys.n_x, "simulate_differential: dx0 dimension mismatch");
    detail::require(dw_seq.size() >= base.horizon(),
                    "simulate_differential: dw sequence shorter than the base horizon");
    DifferentialTrajectory out;
    out.dx.reserve(base.horizon() + 1);
    out.dz.reserve(base.horizon());
    out.dx.push_back(dx0);
    for (std::size_t k = 0; k < base.horizon(); ++k) {
        const DifferentialMatrices m = jacobians(sys, base.states[k], base.inputs[k]);
        out.dz.push_back(m.C * out.dx.back() + m.D * dw_seq[k]);
        out.dx.push_back(m.A * out.dx.back() + m.B * dw_seq[k]);
    }
    return out;
}

double validate_dissipation(const TrajectoryPair& pair, const Matrix& P, const SupplyQSR& supply) {
    const Trajectory& a = pair.first;
    const Trajectory& b = pair.second;
    detail::require(a.horizon() == b.horizon(), "validate_dissipation: horizon mismatch");
    detail::require(!a.states.empty() && a.states[0].size() == P.rows(),
                    "validate_dissipation: P does not match the state dimension");
    detail::require((P - P.transpose()).cwiseAbs().maxCoeff() <=
                        1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff()),
                    "validate_dissipation: P must be symmetric");

    const auto storage = [&](std::size_t k) {
        const Vector e = a.states[k] - b.states[k];
        return e.dot(P * e);
    };
    double max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.horizon(); ++k) {
        const Vector dw = a.inputs[k] - b.inputs[k];
        const Vector dz = a.outputs[k] - b.outputs[k];
        const double v = storage(k + 1) - storage(k) - supply.evaluate(dw, dz);
        max_violation = std::max(max_violation, v);
    }
    return max_violation;
}

LongRunReport classify_longrun(const Trajectory& traj, std::size_t settle_k, double tol) {
    detail::require(traj.horizon() > settle_k, "classify_longrun: horizon must exceed settle_k");
    LongRunReport report;
    const Index n = traj.states.front().size();
    report.peak_to_peak_per_state = Vector::Zero(n);

    for (const auto& x : traj.states) {
        if (x.norm() > 1e6) {
            report.classification = LongRunClass::Diverged;
            return report;
        }
    }

    double max_step = 0.0;
    for (std::size_t k = settle_k; k + 1 < traj.states.size(); ++k) {
        max_step = std::max(max_step, (traj.states[k + 1] - traj.states[k]).norm());
    }
    Vector lo = traj.states[settle_k];
    Vector hi = traj.states[settle_k];
    for (std::size_t k = settle_k; k < traj.states.size(); ++k) {
        lo = lo.cwiseMin(traj.states[k]);
        hi = hi.cwiseMax(traj.states[k]);
    }
    report.peak_to_peak_per_state = hi - lo;
    report.peak_to_peak = report.peak_to_peak_per_state.maxCoeff();
    report.classification =
        max_step <= tol ? LongRunClass::Converged : LongRunClass::Oscillating;
    return report;
}

GainLowerBound empirical_gain_lower_bound(const DiscreteTimeSystem& sys,
                                          const std::vector<TrajectoryPair>& pairs) {
    GainLowerBound out;
    for (const auto& pair : pairs) {
        detail::require(pair.first.states.front().size() == sys.n_x,
                        "empirical_gain_lower_bound: pair does not match the system");
        KahanSum wsum, zsum;
        for (std::size_t k = 0; k < pair.first.horizon(); ++k) {
            wsum.add((pair.first.inputs[k] - pair.second.inputs[k]).squaredNorm());
            zsum.add((pair.first.outputs[k] - pair.second.outputs[k]).squaredNorm());
        }
        if (wsum.sum <= 0.0) {
            ++out.pairs_skipped;
            continue;
        }
        ++out.pairs_used;
        out.value = std::max(out.value, std::sqrt(zsum.sum / wsum.sum));
    }
    return out;
}

std::vector<Vector> bandlimited_inputs(Index n_w, std::size_t horizon, double amplitude,
                                       double smoothing, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Vector> w(horizon, Vector::Zero(n_w));
    Vector state = Vector::Zero(n_w);
    for (std::size_t k = 0; k < horizon; ++k) {
        for (Index i = 0; i < n_w; ++i) {
            state(i) = smoothing * state(i) + (1.0 - smoothing) * unit(rng);
        }
        w[k] = (amplitude * state).cwiseMax(-amplitude).cwiseMin(amplitude);
    }
    return w;
}

std::vector<TrajectoryPair> sample_trajectory_pairs(const DiscreteTimeSystem& sys,
                                                    const SchedulingMap& schedmap,
                                                    const BoxRegion& region, int n_pairs,
                                                    const PairSamplingOptions& opts,
                                                    std::mt19937_64& rng) {
    detail::require(n_pairs > 0, "sample_trajectory_pairs: n_pairs must be positive");
    detail::require(static_cast<Index>(opts.initial_box.intervals.size()) == sys.n_x,
                    "sample_trajectory_pairs: initial_box must match the state dimension");
    detail::require(static_cast<bool>(schedmap.selector),
                    "sample_trajectory_pairs: scheduling selector is not set");
    opts.initial_box.validate();

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw_state = [&]() {
        Vector x(sys.n_x);
        for (Index i = 0; i < sys.n_x; ++i) {
            const auto& [lo, hi] = opts.initial_box.intervals[static_cast<std::size_t>(i)];
            x(i) = lo + (hi - lo) * unit(rng);
        }
        return x;
    };
    const auto in_region = [&](const Trajectory& t) {
        if (t.truncated_at) return false;
        for (std::size_t k = 0; k < t.horizon(); ++k) {
            if (!region.contains(schedmap.selector(t.states[k], t.inputs[k]))) return false;
        }
        return true;
    };

    std::vector<TrajectoryPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    int attempts = 0;
    const int budget = opts.max_attempts_per_pair * n_pairs;
    while (static_cast<int>(pairs.size()) < n_pairs) {
        if (++attempts > budget) {
            throw EvaluationError(
                "sample_trajectory_pairs: rejection budget exhausted; shrink the initial box or "
                "input amplitude");
        }
        const Vector x0a = draw_state();
        const Vector x0b = opts.share_initial_state ? x0a : draw_state();
        const auto wa = bandlimited_inputs(sys.n_w, opts.horizon, opts.input_amplitude,
                                           opts.input_smoothing, rng);
        const auto wb = bandlimited_inputs(sys.n_w, opts.horizon, opts.input_amplitude,
                                           opts.input_smoothing, rng);
        TrajectoryPair pair{simulate(sys, x0a, wa), simulate(sys, x0b, wb)};
        if (!in_region(pair.first) || !in_region(pair.second)) continue;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    detail::require(!traj.states.empty(), "write_trajectory_csv: empty trajectory");
    const Index nx = traj.states.front().size();
    const Index nw = traj.inputs.empty() ? 0 : traj.inputs.front().size();
    const Index nz = traj.outputs.empty() ? 0 : traj.outputs.front().size();
    os << "k";
    for (Index i = 1; i <= nx; ++i) os << ",x" << i;
    for (Index i = 1; i <= nw; ++i) os << ",w" << i;
    for (Index i = 1; i <= nz; ++i) os << ",z" << i;
    os << "\n";
    for (std::size_t k = 0; k < traj.horizon(); ++k) {
        os << k;
        for (Index i = 0; i < nx; ++i) {
            os << ",";
            write_double(os, traj.states[k](i));
        }
        for (Index i = 0; i < nw; ++i) {
            os << ",";
            write_double(os, traj.inputs[k](i));
        }
        for (Index i = 0; i < nz; ++i) {
            os << ",";
            write_double(os, traj.outputs[k](i));
        }
        os << "\n";
    }
}

}  // namespace incrcert
