#pragma once

#include <cstdint>

#include "gmk/kernel.hpp"

namespace gmk {

enum class SimMethod { exact, euler };

/// Deterministic per-path random stream: a splitmix64 counter generator
/// keyed by (seed, stream id), with Box-Muller normals. Identical
/// (seed, stream) always reproduces the identical draw sequence,
/// independent of threading or scheduling.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream);

    /// uniform in (0, 1)
    double uniform();
    /// standard normal
    double normal();

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Batch of sampled paths on a shared grid; paths[p] is m x n.
struct PathBatch {
    TimeGrid grid;
    int dim = 1;
    std::uint64_t seed = 0;
    SimMethod method = SimMethod::exact;
    std::vector<Matrix> paths;

    std::size_t n_paths() const { return paths.size(); }
    Vector state(std::size_t path, std::size_t grid_index) const {
        return paths[path].col(static_cast<Eigen::Index>(grid_index));
    }
};

/// Symmetric factorization of a PSD matrix for sampling, with the diagonal
/// jitter escalation ladder (1e-12, 1e-10, 1e-8 x trace/dim) before failing.
Matrix sampling_factor(const Matrix& cov);

/// Exact draws from the zero-mean Gaussian with Gram = gram(params, grid).
PathBatch sample_paths(const KernelParams& params, const TimeGrid& grid,
                       std::size_t n_paths, std::uint64_t seed);

/// Exact draws from the matrix-scaled Brownian bridge pinned at (u, x_u),
/// over a grid contained in (0, u].
PathBatch sample_bridge(const Matrix& alpha, double u, const Vector& x_u,
                        const TimeGrid& grid, std::size_t n_paths,
                        std::uint64_t seed);

/// Euler-Maruyama integration of dX = mu0(t) X dt + sigma0(t) dW from
/// X(0) = 0, recording states at grid times (which must be multiples of dt).
/// diffusion_override, when given, replaces the noise factor table (one
/// m x m factor per model interval) without touching the drift.
PathBatch euler_maruyama(const SemiParamModel& model, double dt, double t_end,
                         std::size_t n_paths, std::uint64_t seed,
                         const TimeGrid& record_grid,
                         const std::vector<Matrix>* diffusion_override = nullptr);

/// Uncentered Monte Carlo cross-moment (1/p) sum X(t_i) X(t_j)^T.
Matrix empirical_cov(const PathBatch& batch, std::size_t i, std::size_t j);

} // namespace gmk
