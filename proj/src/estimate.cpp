#include "gmk/estimate.hpp"

#include <cmath>
#include <numbers>

namespace gmk {

namespace {

// one rank-one summand of the alpha estimator, for the consecutive pair
// (t0, x0) -> (t1, x1)
Matrix increment_term(double t0, const Vector& x0, double t1, const Vector& x1) {
    const Vector d = t1 * x0 - t0 * x1;
    return d * d.transpose() / (t0 * t1 * (t1 - t0));
}

FitReport assemble(Matrix sum_terms, std::size_t n, double t_last, Vector x_last) {
    FitReport r;
    r.n = n;
    r.t_last = t_last;
    r.x_last = std::move(x_last);
    r.sum_terms = std::move(sum_terms);
    r.alpha_hat = r.sum_terms / static_cast<double>(n - 1);
    r.beta_hat = r.alpha_hat / t_last -
                 (r.x_last * r.x_last.transpose()) / (t_last * t_last);
    return r;
}

} // namespace

SampleSet::SampleSet(TimeGrid grid, Matrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.cols()) != grid_.size())
        throw InvalidInput("SampleSet: column count must equal grid length");
    if (values_.rows() < 1)
        throw InvalidInput("SampleSet: state dimension must be >= 1");
    if (!values_.allFinite())
        throw InvalidInput("SampleSet: all entries must be finite");
}

FitReport fit(const SampleSet& data) {
    const auto n = data.size();
    if (n < 2)
        throw InvalidInput("fit: need at least 2 samples");
    const int m = data.dim();
    const TimeGrid& t = data.grid();
    const Matrix& x = data.values();

    Matrix sum = Matrix::Zero(m, m);
    for (std::size_t i = 0; i + 1 < n; ++i)
        sum += increment_term(t[i], x.col(i), t[i + 1], x.col(i + 1));
    return assemble(std::move(sum), n, t.last(), x.col(n - 1));
}

FitReport update(const FitReport& report, double t_new, const Vector& x_new) {
    if (!(t_new > report.t_last))
        throw InvalidInput("update: new time must exceed the last sample time");
    if (x_new.size() != report.dim())
        throw InvalidInput("update: state dimension mismatch");
    Matrix sum = report.sum_terms +
                 increment_term(report.t_last, report.x_last, t_new, x_new);
    return assemble(std::move(sum), report.n + 1, t_new, x_new);
}

double loglik(const KernelParams& params, const SampleSet& data) {
    if (params.dim() != data.dim())
        throw InvalidInput("loglik: dimension mismatch");
    const Matrix g = gram(params, data.grid());
    const int m = data.dim();
    const auto n = static_cast<Eigen::Index>(data.size());

    Vector x(m * n);
    for (Eigen::Index i = 0; i < n; ++i)
        x.segment(i * m, m) = data.values().col(i);

    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Vector& ev = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    const Vector y = es.eigenvectors().transpose() * x;

    double logpdet = 0.0, quad = 0.0, resid_sq = 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) {
            ++rank;
            logpdet += std::log(ev[i]);
            quad += y[i] * y[i] / ev[i];
        } else {
            resid_sq += y[i] * y[i];
        }
    }

    // support check: the observation must lie in the range of the Gram
    const double xnorm = x.norm();
    if (xnorm > 0.0 && std::sqrt(resid_sq) > 1e-8 * xnorm)
        return -std::numeric_limits<double>::infinity();

    return -0.5 * (rank * std::log(2.0 * std::numbers::pi) + logpdet + quad);
}

Matrix bridge_fit(const SampleSet& interior, double t_end, const Vector& x_end) {
    const auto k = static_cast<Eigen::Index>(interior.size());
    const int m = interior.dim();
    if (x_end.size() != m)
        throw InvalidInput("bridge_fit: endpoint dimension mismatch");
    if (!(interior.grid().last() < t_end))
        throw DomainError("bridge_fit: interior times must precede t_end");

    const TimeGrid& t = interior.grid();
    Matrix centered(m, k); // Y = X - M, M_j = (t_j / t_end) x_end
    for (Eigen::Index j = 0; j < k; ++j)
        centered.col(j) = interior.values().col(j) - (t[j] / t_end) * x_end;

    Matrix bridge_gram(k, k); // T_ij = t_i (1 - t_j / t_end), i <= j
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            const double lo = std::min(t[i], t[j]), hi = std::max(t[i], t[j]);
            bridge_gram(i, j) = lo * (1.0 - hi / t_end);
        }

    const Matrix solved = bridge_gram.ldlt().solve(centered.transpose());
    return centered * solved / static_cast<double>(k);
}

} // namespace gmk
