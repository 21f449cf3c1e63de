#include "incrcert/embedding.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace incrcert {

namespace {

// Index-chunked parallel map with deterministic gather order.
void parallel_over(std::size_t count, int threads, const std::function<void(std::size_t)>& work) {
    unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    if (n <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto runner = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols) {
    Matrix m(rows, cols);
    const auto& data = j.get<std::vector<double>>();
    detail::require(static_cast<Index>(data.size()) == rows * cols,
                    "matrix_from_json: element count mismatch");
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    return m;
}

std::vector<double> row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

}  // namespace

void BoxRegion::validate() const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& [lo, hi] = intervals[i];
        detail::require(std::isfinite(lo) && std::isfinite(hi),
                        "BoxRegion: bounds must be finite in dimension " + std::to_string(i));
        detail::require(lo < hi, "BoxRegion: lower >= upper in dimension " + std::to_string(i));
    }
}

bool BoxRegion::contains(const Vector& p, double tol) const {
    if (p.size() != dim()) return false;
    for (Index i = 0; i < dim(); ++i) {
        const auto& [lo, hi] = intervals[static_cast<std::size_t>(i)];
        if (p(i) < lo - tol || p(i) > hi + tol) return false;
    }
    return true;
}

std::vector<Vector> generate_grid(const BoxRegion& region,
                                  const std::vector<int>& points_per_dim) {
    region.validate();
    detail::require(points_per_dim.size() == region.intervals.size(),
                    "generate_grid: points_per_dim size must match region dimension");
    std::size_t total = 1;
    for (int c : points_per_dim) {
        detail::require(c >= 1, "generate_grid: grid counts must be >= 1");
        total *= static_cast<std::size_t>(c);
    }

    std::vector<std::vector<double>> axes(points_per_dim.size());
    for (std::size_t d = 0; d < points_per_dim.size(); ++d) {
        const auto& [lo, hi] = region.intervals[d];
        const int c = points_per_dim[d];
        if (c == 1) {
            axes[d] = {0.5 * (lo + hi)};
        } else {
            axes[d].resize(static_cast<std::size_t>(c));
            for (int i = 0; i < c; ++i)
                axes[d][static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (c - 1);
        }
    }

    std::vector<Vector> grid;
    grid.reserve(total);
    const Index dim = region.dim();
    std::vector<std::size_t> idx(points_per_dim.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vector p(dim);
        for (Index d = 0; d < dim; ++d) p(d) = axes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
        grid.push_back(std::move(p));
        // increment last dimension fastest
        for (Index d = dim - 1; d >= 0; --d) {
            auto& i = idx[static_cast<std::size_t>(d)];
            if (++i < axes[static_cast<std::size_t>(d)].size()) break;
            i = 0;
        }
    }
    return grid;
}

GriddedEmbedding embed_differential_form(const DiscreteTimeSystem& sys,
                                         const SchedulingMap& schedmap,
                                         const std::vector<Vector>& grid, const BoxRegion& region,
                                         const std::vector<int>& points_per_dim, int threads) {
    detail::require(static_cast<bool>(schedmap.lift), "embed_differential_form: lift is not set");
    detail::require(!grid.empty(), "embed_differential_form: grid is empty");

    GriddedEmbedding emb;
    emb.points = grid;
    emb.region = region;
    emb.points_per_dim = points_per_dim;
    emb.n_x = sys.n_x;
    emb.n_w = sys.n_w;
    emb.n_z = sys.n_z;
    emb.matrices.resize(grid.size());

    parallel_over(grid.size(), threads, [&](std::size_t i) {
        const auto [x, w] = schedmap.lift(grid[i]);
        try {
            emb.matrices[i] = jacobians(sys, x, w);
        } catch (const EvaluationError& e) {
            std::ostringstream os;
            os << "embed_differential_form: Jacobian failure at grid point " << i << " (rho=["
               << grid[i].transpose() << "]): " << e.what();
            throw EvaluationError(os.str());
        }
    });
    return emb;
}

GriddedEmbedding make_embedding(const DiscreteTimeSystem& sys, const SchedulingMap& schedmap,
                                const BoxRegion& region, const std::vector<int>& points_per_dim,
                                int threads) {
    return embed_differential_form(sys, schedmap, generate_grid(region, points_per_dim), region,
                                   points_per_dim, threads);
}

void to_json(nlohmann::json& j, const BoxRegion& region) {
    j = nlohmann::json::array();
    for (const auto& [lo, hi] : region.intervals) j.push_back({lo, hi});
}

void from_json(const nlohmann::json& j, BoxRegion& region) {
    region.intervals.clear();
    for (const auto& pair : j) {
        region.intervals.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
}

void to_json(nlohmann::json& j, const GriddedEmbedding& emb) {
    j["n_x"] = emb.n_x;
    j["n_w"] = emb.n_w;
    j["n_z"] = emb.n_z;
    j["region"] = emb.region;
    j["points_per_dim"] = emb.points_per_dim;
    auto points = nlohmann::json::array();
    for (const auto& p : emb.points) points.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    j["points"] = std::move(points);
    auto mats = nlohmann::json::array();
    for (const auto& m : emb.matrices) {
        mats.push_back({{"A", row_major(m.A)},
                        {"B", row_major(m.B)},
                        {"C", row_major(m.C)},
                        {"D", row_major(m.D)}});
    }
    j["matrices"] = std::move(mats);
}

void from_json(const nlohmann::json& j, GriddedEmbedding& emb) {
    emb.n_x = j.at("n_x").get<Index>();
    emb.n_w = j.at("n_w").get<Index>();
    emb.n_z = j.at("n_z").get<Index>();
    emb.region = j.at("region").get<BoxRegion>();
    emb.points_per_dim = j.at("points_per_dim").get<std::vector<int>>();
    emb.points.clear();
    for (const auto& p : j.at("points")) {
        const auto data = p.get<std::vector<double>>();
        emb.points.push_back(Eigen::Map<const Vector>(data.data(), static_cast<Index>(data.size())));
    }
    emb.matrices.clear();
    for (const auto& m : j.at("matrices")) {
        DifferentialMatrices dm;
        dm.A = matrix_from_json(m.at("A"), emb.n_x, emb.n_x);
        dm.B = matrix_from_json(m.at("B"), emb.n_x, emb.n_w);
        dm.C = matrix_from_json(m.at("C"), emb.n_z, emb.n_x);
        dm.D = matrix_from_json(m.at("D"), emb.n_z, emb.n_w);
        emb.matrices.push_back(std::move(dm));
    }
    detail::require(emb.points.size() == emb.matrices.size(),
                    "GriddedEmbedding: points/matrices length mismatch");
}

}  // namespace incrcert
