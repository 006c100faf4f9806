#pragma once

#include <optional>

#include "gmk/simulate.hpp"

namespace gmk {

/// Autocorrelation of increments over a span s: closed-form values for the
/// scalar stationary-increment kernel, optionally paired with Monte Carlo
/// counterparts.
struct AutocorrReport {
    double s = 0.0;
    double theoretical_rho = 0.0;
    double theoretical_rho_sq = 0.0;
    std::optional<double> empirical_rho;
    std::optional<double> empirical_rho_sq;
    /// rho^2 <= rho_sq <= |rho| chain holds
    bool inequality_ok = false;
};

/// Closed-form increment autocorrelation for scalar parameters:
/// rho = -s*beta / (alpha - s*beta), rho_sq = rho^2, independent of the
/// window position and lag. Multivariate parameters are rejected.
AutocorrReport increment_autocorr(const KernelParams& params, double s);

struct EmpiricalAutocorr {
    double rho = 0.0;
    double rho_sq = 0.0;
    std::size_t n_samples = 0;
};

/// Sample Pearson correlations of increments R_s(t) with R_s(t+u) (and of
/// their squares), pooled across paths and disjoint window positions of an
/// equispaced batch. Spans are in grid steps; u_span >= s_span required so
/// the paired windows do not overlap.
EmpiricalAutocorr empirical_increment_autocorr(const PathBatch& batch,
                                               std::size_t s_span,
                                               std::size_t u_span);

} // namespace gmk
