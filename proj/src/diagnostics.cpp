#include "gmk/diagnostics.hpp"

#include <cmath>

namespace gmk {

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw NumericalError("empirical_increment_autocorr: zero variance, "
                             "correlation undefined");
    return sab / std::sqrt(saa * sbb);
}

} // namespace

AutocorrReport increment_autocorr(const KernelParams& params, double s) {
    if (params.dim() != 1)
        throw InvalidInput("increment_autocorr: closed form is scalar only");
    if (!(s > 0.0))
        throw InvalidInput("increment_autocorr: span must be positive");
    const double alpha = params.alpha()(0, 0);
    const double beta = params.beta()(0, 0);
    const double denom = alpha - s * beta;
    if (!(denom > 0.0))
        throw DomainError("increment_autocorr: requires alpha - s*beta > 0");

    AutocorrReport rep;
    rep.s = s;
    rep.theoretical_rho = -s * beta / denom;
    rep.theoretical_rho_sq = rep.theoretical_rho * rep.theoretical_rho;
    const double abs_rho = std::abs(rep.theoretical_rho);
    rep.inequality_ok = rep.theoretical_rho_sq <= abs_rho && abs_rho <= 1.0;
    return rep;
}

EmpiricalAutocorr empirical_increment_autocorr(const PathBatch& batch,
                                               std::size_t s_span,
                                               std::size_t u_span) {
    if (s_span < 1 || u_span < s_span)
        throw InvalidInput("empirical_increment_autocorr: need u_span >= s_span >= 1 "
                           "(overlapping windows are not supported)");
    const auto n = batch.grid.size();
    if (batch.dim != 1)
        throw InvalidInput("empirical_increment_autocorr: scalar batches only");
    if (n < 2 || s_span + u_span > n - 1)
        throw InvalidInput("empirical_increment_autocorr: grid too short for spans");

    const double h = batch.grid[1] - batch.grid[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs(batch.grid[i + 1] - batch.grid[i] - h) > 1e-9 * h)
            throw InvalidInput("empirical_increment_autocorr: grid must be equispaced");

    std::vector<double> first, second, first_sq, second_sq;
    for (std::size_t a = 0; a + u_span + s_span < n; a += s_span + u_span) {
        for (std::size_t p = 0; p < batch.n_paths(); ++p) {
            const Matrix& path = batch.paths[p];
            const double r0 = path(0, static_cast<Eigen::Index>(a + s_span)) -
                              path(0, static_cast<Eigen::Index>(a));
            const double r1 = path(0, static_cast<Eigen::Index>(a + u_span + s_span)) -
                              path(0, static_cast<Eigen::Index>(a + u_span));
            first.push_back(r0);
            second.push_back(r1);
            first_sq.push_back(r0 * r0);
            second_sq.push_back(r1 * r1);
        }
    }
    if (first.size() < 2)
        throw InvalidInput("empirical_increment_autocorr: not enough samples");

    EmpiricalAutocorr out;
    out.rho = pearson(first, second);
    out.rho_sq = pearson(first_sq, second_sq);
    out.n_samples = first.size();
    return out;
}

} // namespace gmk
