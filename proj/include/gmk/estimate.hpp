#pragma once

#include <optional>

#include "gmk/kernel.hpp"

namespace gmk {

/// Discretely sampled path: column i of values is the observed state at
/// grid time t_i.
class SampleSet {
public:
    SampleSet(TimeGrid grid, Matrix values);

    const TimeGrid& grid() const { return grid_; }
    const Matrix& values() const { return values_; }
    int dim() const { return static_cast<int>(values_.rows()); }
    std::size_t size() const { return grid_.size(); }

private:
    TimeGrid grid_;
    Matrix values_;
};

/// Result of closed-form maximum-likelihood fitting, carrying the running
/// sufficient-statistic accumulator so new observations can be absorbed in
/// O(1) without revisiting old samples.
struct FitReport {
    Matrix alpha_hat;
    Matrix beta_hat;
    std::size_t n = 0;
    double t_last = 0.0;
    Vector x_last;
    /// Unnormalized sum of the n-1 rank-one increment terms; alpha_hat is
    /// sum_terms / (n-1).
    Matrix sum_terms;
    std::optional<double> loglik;

    int dim() const { return static_cast<int>(alpha_hat.rows()); }
};

/// Closed-form MLE of (alpha, beta) from a sampled path; requires n >= 2.
FitReport fit(const SampleSet& data);

/// Absorb one new observation; exactly equivalent to refitting on the
/// extended sample, at cost independent of n.
FitReport update(const FitReport& report, double t_new, const Vector& x_new);

/// Exact log joint density of the samples under the zero-mean Gaussian law
/// with the given kernel. Rank-deficient Gram matrices are handled with the
/// pseudo-determinant and pseudo-inverse; observations outside the range of
/// the Gram (relative residual > 1e-8) yield -infinity.
double loglik(const KernelParams& params, const SampleSet& data);

/// MLE of the scaling matrix of a matrix-scaled Brownian bridge pinned at
/// (t_end, x_end), from interior samples. Coincides with fit() applied to
/// the concatenated sample.
Matrix bridge_fit(const SampleSet& interior, double t_end, const Vector& x_end);

} // namespace gmk
