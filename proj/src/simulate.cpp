#include "gmk/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

namespace gmk {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, std::max<std::size_t>(1, count / 256));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& w : workers) w.join();
}

} // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream) {
    // decorrelate (seed, stream) pairs before use
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    s = stream ^ 0xD1B54A32D192ED03ULL;
    const std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9E3779B97F4A7C15ULL);
}

double PathRng::uniform() {
    // top 53 bits -> (0, 1)
    const std::uint64_t bits = splitmix64(state_) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double PathRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

Matrix sampling_factor(const Matrix& cov) {
    const Eigen::Index n = cov.rows();
    const double scale = std::max(cov.trace() / static_cast<double>(n), 0.0);
    const double floor = -kPsdTol * std::max(std::abs(cov.trace()), 1e-300);
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
        Matrix probe = cov;
        probe.diagonal().array() += jitter * scale;
        Eigen::SelfAdjointEigenSolver<Matrix> es(probe);
        if (es.eigenvalues().minCoeff() >= floor) {
            const Vector sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            return es.eigenvectors() * sq.asDiagonal();
        }
    }
    throw NumericalError("sampling_factor: covariance not PSD after jitter escalation");
}

PathBatch sample_paths(const KernelParams& params, const TimeGrid& grid,
                       std::size_t n_paths, std::uint64_t seed) {
    if (n_paths < 1)
        throw InvalidInput("sample_paths: need at least one path");
    const int m = params.dim();
    const auto n = static_cast<Eigen::Index>(grid.size());
    const Matrix factor = sampling_factor(gram(params, grid));

    PathBatch batch{grid, m, seed, SimMethod::exact, {}};
    batch.paths.assign(n_paths, Matrix());
    parallel_for(n_paths, [&](std::size_t p) {
        PathRng rng(seed, p);
        Vector z(m * n);
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
        const Vector y = factor * z;
        batch.paths[p] = Eigen::Map<const Matrix>(y.data(), m, n);
    });
    return batch;
}

PathBatch sample_bridge(const Matrix& alpha, double u, const Vector& x_u,
                        const TimeGrid& grid, std::size_t n_paths,
                        std::uint64_t seed) {
    if (!is_symmetric(alpha) || !is_psd(alpha))
        throw InvalidInput("sample_bridge: alpha must be symmetric PSD");
    if (grid.last() > u)
        throw DomainError("sample_bridge: grid must lie in (0, u]");
    if (x_u.size() != alpha.rows())
        throw InvalidInput("sample_bridge: endpoint dimension mismatch");
    if (n_paths < 1)
        throw InvalidInput("sample_bridge: need at least one path");

    const int m = static_cast<int>(alpha.rows());
    const auto n = static_cast<Eigen::Index>(grid.size());

    Vector mean(m * n);
    Matrix cov(m * n, m * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mean.segment(i * m, m) = (grid[i] / u) * x_u;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double lo = std::min(grid[i], grid[j]);
            const double hi = std::max(grid[i], grid[j]);
            cov.block(i * m, j * m, m, m) = (1.0 - hi / u) * lo * alpha;
        }
    }
    const Matrix factor = sampling_factor(cov);

    PathBatch batch{grid, m, seed, SimMethod::exact, {}};
    batch.paths.assign(n_paths, Matrix());
    parallel_for(n_paths, [&](std::size_t p) {
        PathRng rng(seed, p);
        Vector z(m * n);
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
        const Vector y = mean + factor * z;
        batch.paths[p] = Eigen::Map<const Matrix>(y.data(), m, n);
    });
    return batch;
}

PathBatch euler_maruyama(const SemiParamModel& model, double dt, double t_end,
                         std::size_t n_paths, std::uint64_t seed,
                         const TimeGrid& record_grid,
                         const std::vector<Matrix>* diffusion_override) {
    if (!(dt > 0.0))
        throw InvalidInput("euler_maruyama: dt must be positive");
    if (record_grid.last() > t_end * (1.0 + 1e-12))
        throw InvalidInput("euler_maruyama: record grid must lie in (0, t_end]");
    if (n_paths < 1)
        throw InvalidInput("euler_maruyama: need at least one path");
    if (diffusion_override &&
        diffusion_override->size() != model.diffusion_blocks().size())
        throw InvalidInput("euler_maruyama: override must supply one factor per block");

    const int m = model.dim();
    const auto n = static_cast<Eigen::Index>(record_grid.size());

    // snap record times to step boundaries; dt must divide the grid
    std::vector<std::size_t> record_step(record_grid.size());
    for (std::size_t i = 0; i < record_grid.size(); ++i) {
        const double t = record_grid[i];
        const auto k = static_cast<std::size_t>(std::llround(t / dt));
        if (k < 1 || std::abs(static_cast<double>(k) * dt - t) > 1e-9 * std::max(dt, t))
            throw InvalidInput("euler_maruyama: dt does not divide record time");
        record_step[i] = k;
    }
    const std::size_t n_steps = record_step.back();

    // drift and scaled noise factors are shared across paths
    std::vector<Matrix> sigma_factors;
    if (!diffusion_override) {
        sigma_factors.reserve(model.diffusion_blocks().size());
        for (const Matrix& block : model.diffusion_blocks())
            sigma_factors.push_back(psd_sqrt(block));
    }
    const std::vector<Matrix>& factors =
        diffusion_override ? *diffusion_override : sigma_factors;

    const double sqrt_dt = std::sqrt(dt);
    std::vector<Matrix> drift_dt(n_steps), noise(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const double tau = static_cast<double>(j) * dt;
        drift_dt[j] = drift_mu0(model, tau) * dt;
        auto it = std::upper_bound(model.breakpoints().begin(),
                                   model.breakpoints().end(), tau);
        const auto block = static_cast<std::size_t>(it - model.breakpoints().begin()) - 1;
        noise[j] = factors[block] * sqrt_dt;
    }

    PathBatch batch{record_grid, m, seed, SimMethod::euler, {}};
    batch.paths.assign(n_paths, Matrix());
    parallel_for(n_paths, [&](std::size_t p) {
        PathRng rng(seed, p);
        Matrix out(m, n);
        Vector x = Vector::Zero(m), step(m), z(m);
        std::size_t next_record = 0;
        for (std::size_t j = 0; j < n_steps; ++j) {
            for (int c = 0; c < m; ++c) z[c] = rng.normal();
            step.noalias() = drift_dt[j] * x;
            step.noalias() += noise[j] * z;
            x += step;
            if (next_record < record_step.size() && record_step[next_record] == j + 1)
                out.col(static_cast<Eigen::Index>(next_record++)) = x;
        }
        batch.paths[p] = std::move(out);
    });
    return batch;
}

Matrix empirical_cov(const PathBatch& batch, std::size_t i, std::size_t j) {
    if (i >= batch.grid.size() || j >= batch.grid.size())
        throw InvalidInput("empirical_cov: grid index out of range");
    const auto p = batch.n_paths();
    Matrix acc = Matrix::Zero(batch.dim, batch.dim);
    for (std::size_t k = 0; k < p; ++k)
        acc += batch.paths[k].col(static_cast<Eigen::Index>(i)) *
               batch.paths[k].col(static_cast<Eigen::Index>(j)).transpose();
    return acc / static_cast<double>(p);
}

} // namespace gmk
