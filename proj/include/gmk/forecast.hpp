#pragma once

#include "gmk/estimate.hpp"

namespace gmk {

/// Predictive moments over a query grid, plus marginal bands
/// mean +- band_multiplier * sqrt(diag(cov)).
struct Forecast {
    std::vector<double> query_times;
    std::vector<Vector> means;
    std::vector<Matrix> covariances;
    double band_multiplier = 1.96;

    Vector sd(std::size_t i) const { return covariances[i].diagonal().cwiseMax(0.0).cwiseSqrt(); }
    Vector lower(std::size_t i) const { return means[i] - band_multiplier * sd(i); }
    Vector upper(std::size_t i) const { return means[i] + band_multiplier * sd(i); }
};

/// Supremum of t with alpha_hat - beta_hat * t positive definite; +infinity
/// when beta_hat has no positive eigenvalue relative to alpha_hat, 0 when
/// alpha_hat itself is not positive definite.
double max_horizon(const FitReport& report);

/// Same bound for an explicit (alpha, beta) pair.
double max_horizon(const Matrix& alpha, const Matrix& beta);

/// Posterior mean at t >= t_last: affine in t, anchored at x_last.
Vector posterior_mean(const FitReport& report, double t);

/// Posterior cross-covariance between query times t, s >= t_last, under the
/// fitted kernel; zero at t = s = t_last. The x_last = 0 degenerate case
/// follows the Moore-Penrose convention (zero mean, unreduced covariance).
Matrix posterior_cov(const FitReport& report, double t, double s);

/// Vectorized posterior moments over a query grid.
Forecast forecast_path(const FitReport& report, const TimeGrid& query,
                       double band_multiplier = 1.96);

} // namespace gmk
