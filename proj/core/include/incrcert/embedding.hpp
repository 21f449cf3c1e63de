#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "incrcert/system.hpp"
#include "incrcert/types.hpp"

namespace incrcert {

/// Axis-aligned compact box, one (lower, upper) interval per coordinate.
struct BoxRegion {
    std::vector<std::pair<double, double>> intervals;

    Index dim() const { return static_cast<Index>(intervals.size()); }
    bool contains(const Vector& p, double tol = 0.0) const;
    void validate() const;  // finite bounds, lower < upper
};

/// Scheduling map of an LPV embedding: psi carries an operating point to the
/// scheduling vector, and `lift` picks a representative operating point for a
/// scheduling value (the point at which Jacobians are evaluated).
struct SchedulingMap {
    Index n_rho = 0;
    std::function<Vector(const Vector& x, const Vector& w)> selector;
    std::function<std::pair<Vector, Vector>(const Vector& rho)> lift;
};

/// Differential form evaluated on a finite scheduling grid. The stored
/// matrices are exact Jacobians at the grid points; between points the usual
/// gridding caveat applies (the LMI certificate is formally valid for the
/// gridded constraint set only).
struct GriddedEmbedding {
    std::vector<Vector> points;
    std::vector<DifferentialMatrices> matrices;
    BoxRegion region;
    std::vector<int> points_per_dim;
    Index n_x = 0;
    Index n_w = 0;
    Index n_z = 0;

    std::size_t size() const { return points.size(); }
};

/// Cartesian product of equidistant per-dimension points, both endpoints
/// included (a count of 1 yields the interval midpoint). Lexicographic order,
/// first dimension slowest.
std::vector<Vector> generate_grid(const BoxRegion& region,
                                  const std::vector<int>& points_per_dim);

/// Evaluates the differential form at every grid point through the scheduling
/// lift. Jacobian evaluation across points runs on `threads` workers
/// (0 = hardware concurrency); results are gathered in grid order.
GriddedEmbedding embed_differential_form(const DiscreteTimeSystem& sys,
                                         const SchedulingMap& schedmap,
                                         const std::vector<Vector>& grid,
                                         const BoxRegion& region,
                                         const std::vector<int>& points_per_dim,
                                         int threads = 0);

/// Convenience: generate_grid + embed_differential_form.
GriddedEmbedding make_embedding(const DiscreteTimeSystem& sys, const SchedulingMap& schedmap,
                                const BoxRegion& region, const std::vector<int>& points_per_dim,
                                int threads = 0);

void to_json(nlohmann::json& j, const BoxRegion& region);
void from_json(const nlohmann::json& j, BoxRegion& region);
void to_json(nlohmann::json& j, const GriddedEmbedding& emb);
void from_json(const nlohmann::json& j, GriddedEmbedding& emb);

}  // namespace incrcert
