#include "gmk/forecast.hpp"

#include <cmath>
#include <sstream>

namespace gmk {

namespace {

// fitted kernel, evaluated without constructing a KernelParams (alpha_hat
// may legitimately be singular, e.g. for short multivariate samples)
Matrix fitted_kernel(const FitReport& r, double t, double s) {
    const double lo = std::min(t, s), hi = std::max(t, s);
    return lo * (r.alpha_hat - r.beta_hat * hi);
}

void check_query(const FitReport& r, double t, double bound) {
    if (t < r.t_last)
        throw DomainError("forecast: query before the last observation "
                          "(backward queries belong to bridge_moments)");
    // relative slack so the last sample time itself is never refused by
    // rounding in the generalized eigenvalue computation
    if (t > bound * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "forecast: query t=" << t
           << " beyond the admissible horizon " << bound;
        throw DomainError(os.str());
    }
}

} // namespace

double max_horizon(const Matrix& alpha, const Matrix& beta) {
    Eigen::SelfAdjointEigenSolver<Matrix> alpha_es(alpha, Eigen::EigenvaluesOnly);
    const double tr = std::abs(alpha.trace());
    if (alpha_es.eigenvalues().minCoeff() <= kPsdTol * std::max(tr, 1e-300))
        return 0.0; // degenerate alpha

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(beta, alpha);
    const double lambda_max = es.eigenvalues().maxCoeff();
    if (lambda_max <= 0.0) return kInfiniteHorizon;
    return 1.0 / lambda_max;
}

double max_horizon(const FitReport& report) {
    return max_horizon(report.alpha_hat, report.beta_hat);
}

Vector posterior_mean(const FitReport& report, double t) {
    if (t < report.t_last)
        throw DomainError("posterior_mean: query before the last observation");
    const double xx = report.x_last.squaredNorm();
    if (xx == 0.0) return Vector::Zero(report.dim());
    const Vector slope =
        report.x_last / report.t_last - report.alpha_hat * report.x_last / xx;
    return report.x_last + slope * (t - report.t_last);
}

Matrix posterior_cov(const FitReport& report, double t, double s) {
    // the fitted kernel is PSD on all of [0, t_last] (each increment term is
    // PSD there) even when alpha_hat is singular and max_horizon reports 0,
    // so the last sample time is always an admissible query
    const double bound = std::max(max_horizon(report), report.t_last);
    check_query(report, t, bound);
    check_query(report, s, bound);

    const Matrix prior = fitted_kernel(report, t, s);
    const double xx = report.x_last.squaredNorm();
    if (xx == 0.0) return prior; // zero pseudo-inverse convention

    const Vector left = fitted_kernel(report, t, report.t_last) * report.x_last;
    const Vector right = fitted_kernel(report, report.t_last, s).transpose() * report.x_last;
    return prior - (left * right.transpose()) / (xx * xx);
}

Forecast forecast_path(const FitReport& report, const TimeGrid& query,
                       double band_multiplier) {
    if (!(band_multiplier > 0.0))
        throw InvalidInput("forecast_path: band multiplier must be positive");
    Forecast f;
    f.band_multiplier = band_multiplier;
    f.query_times = query.times();
    f.means.reserve(query.size());
    f.covariances.reserve(query.size());
    for (double t : query.times()) {
        f.means.push_back(posterior_mean(report, t));
        f.covariances.push_back(posterior_cov(report, t, t));
    }
    return f;
}

} // namespace gmk
