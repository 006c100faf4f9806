#include "gmk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmk {

namespace {

// probe time used for PD checks when the horizon is infinite
constexpr double kInfiniteProbe = 1e9;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

Matrix pseudo_inverse(const Matrix& a, double tol_rel) {
    if (a.rows() != a.cols())
        throw InvalidInput("pseudo_inverse: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    const Vector& ev = es.eigenvalues();
    const double cutoff = tol_rel * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Vector inv = Vector::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) > cutoff) inv[i] = 1.0 / ev[i];
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_sqrt(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

bool is_symmetric(const Matrix& a, double tol_rel) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol_rel * scale;
}

bool is_psd(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    const double tr = std::abs(a.trace());
    const double floor = -kPsdTol * std::max(tr, 1e-300);
    return es.eigenvalues().minCoeff() >= floor;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty())
        throw InvalidInput("TimeGrid: at least one time required");
    double prev = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || times_[i] <= prev)
            throw InvalidInput("TimeGrid: times must be finite, strictly positive and "
                               "strictly increasing (violated at index " +
                               std::to_string(i) + ")");
        prev = times_[i];
    }
}

KernelParams::KernelParams(Matrix alpha, Matrix beta, double horizon)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), horizon_(horizon) {
    if (alpha_.rows() < 1 || alpha_.rows() != alpha_.cols())
        throw InvalidInput("KernelParams: alpha must be square, dim >= 1");
    if (beta_.rows() != alpha_.rows() || beta_.cols() != alpha_.cols())
        throw InvalidInput("KernelParams: beta must match alpha's dimension");
    if (!is_symmetric(alpha_))
        throw InvalidInput("KernelParams: alpha must be symmetric");
    if (!is_symmetric(beta_))
        throw InvalidInput("KernelParams: beta must be symmetric");
    if (!(horizon_ > 0.0))
        throw InvalidInput("KernelParams: horizon must be positive");

    const double probe = std::isinf(horizon_) ? kInfiniteProbe
                                              : horizon_ * (1.0 - 1e-9);
    if (!admissible_at(0.0) || !admissible_at(probe))
        throw InvalidInput("KernelParams: alpha - beta*t must be positive "
                           "semi-definite over [0, horizon)");
}

bool KernelParams::admissible_at(double t) const {
    return is_psd(slice(t));
}

SemiParamModel::SemiParamModel(Matrix omega, std::vector<double> breakpoints,
                               std::vector<Matrix> diffusion_blocks)
    : omega_(std::move(omega)),
      breakpoints_(std::move(breakpoints)),
      blocks_(std::move(diffusion_blocks)) {
    const Eigen::Index m = omega_.rows();
    if (m < 1 || omega_.cols() != m)
        throw InvalidInput("SemiParamModel: omega must be square, dim >= 1");
    if (!is_symmetric(omega_))
        throw InvalidInput("SemiParamModel: omega must be symmetric");
    if (breakpoints_.empty() || breakpoints_.front() != 0.0)
        throw InvalidInput("SemiParamModel: breakpoints must start at 0");
    if (blocks_.size() != breakpoints_.size())
        throw InvalidInput("SemiParamModel: one diffusion block per breakpoint");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k)
        if (!(breakpoints_[k] > breakpoints_[k - 1]))
            throw InvalidInput("SemiParamModel: breakpoints must be strictly increasing");
    for (const Matrix& b : blocks_) {
        if (b.rows() != m || b.cols() != m)
            throw InvalidInput("SemiParamModel: diffusion block dimension mismatch");
        if (!is_symmetric(b) || !is_psd(b))
            throw InvalidInput("SemiParamModel: diffusion blocks must be symmetric PSD");
    }

    // omega nonsingular and the initial block nonsingular (sigma0(0) nonsingular)
    Eigen::FullPivLU<Matrix> lu(omega_);
    const double scale = omega_.cwiseAbs().maxCoeff();
    if (!lu.isInvertible() ||
        std::abs(lu.determinant()) <= 1e-12 * std::pow(scale, double(m)))
        throw InvalidInput("SemiParamModel: omega must be nonsingular");
    omega_inv_ = lu.inverse();

    Eigen::SelfAdjointEigenSolver<Matrix> es(blocks_.front(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw InvalidInput("SemiParamModel: initial diffusion block must be nonsingular");
}

const Matrix& SemiParamModel::diffusion_at(double t) const {
    if (t < 0.0)
        throw DomainError("SemiParamModel: diffusion queried at negative time");
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return blocks_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

Matrix SemiParamModel::diffusion_integral(double a, double b) const {
    if (a < 0.0 || b < a)
        throw DomainError("SemiParamModel: invalid integration bounds");
    Matrix acc = Matrix::Zero(dim(), dim());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const double lo = std::max(a, breakpoints_[k]);
        const double hi = (k + 1 < breakpoints_.size())
                              ? std::min(b, breakpoints_[k + 1])
                              : b;
        if (hi > lo) acc += blocks_[k] * (hi - lo);
    }
    return acc;
}

Matrix kernel_eval(const KernelParams& params, double t, double s) {
    if (t < 0.0 || s < 0.0 || t >= params.horizon() || s >= params.horizon())
        throw DomainError("kernel_eval: time outside [0, horizon): t=" + fmt(t) +
                          ", s=" + fmt(s));
    if (s <= t) return s * params.slice(t);
    return t * params.slice(s);
}

Matrix gram(const KernelParams& params, const TimeGrid& grid) {
    const int m = params.dim();
    const auto n = static_cast<Eigen::Index>(grid.size());
    Matrix g(m * n, m * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Matrix block = kernel_eval(params, grid[i], grid[j]);
            g.block(i * m, j * m, m, m) = block;
            g.block(j * m, i * m, m, m) = block.transpose();
        }
    }
    return g;
}

ConditionalMoments conditional_moments(const KernelParams& params, double u,
                                       const Vector& x_u, double t, double s) {
    if (u <= 0.0)
        throw DomainError("conditional_moments: conditioning time must be positive");
    if (x_u.size() != params.dim())
        throw InvalidInput("conditional_moments: state dimension mismatch");
    const Matrix guu_pinv = pseudo_inverse(kernel_eval(params, u, u));
    const Matrix gtu = kernel_eval(params, t, u);
    const Matrix gus = kernel_eval(params, u, s);
    ConditionalMoments out;
    out.mean = gtu * guu_pinv * x_u;
    out.cov = kernel_eval(params, t, s) - gtu * guu_pinv * gus;
    return out;
}

ConditionalMoments bridge_moments(const Matrix& alpha, double u,
                                  const Vector& x_u, double t, double s) {
    if (!is_symmetric(alpha) || !is_psd(alpha))
        throw InvalidInput("bridge_moments: alpha must be symmetric PSD");
    if (!(u > 0.0))
        throw DomainError("bridge_moments: endpoint time must be positive");
    if (t < 0.0 || t > u || s < 0.0 || s > u)
        throw DomainError("bridge_moments: query times must lie in [0, u]");
    if (x_u.size() != alpha.rows())
        throw InvalidInput("bridge_moments: state dimension mismatch");
    ConditionalMoments out;
    out.mean = (t / u) * x_u;
    const double lo = std::min(t, s), hi = std::max(t, s);
    out.cov = (1.0 - hi / u) * lo * alpha;
    return out;
}

Matrix semiparam_f(const SemiParamModel& model, double eps, double t) {
    if (eps < 0.0 || t < 0.0)
        throw DomainError("semiparam_f: eps and t must be nonnegative");
    if (t == 0.0) return Matrix::Identity(model.dim(), model.dim());
    return Matrix::Identity(model.dim(), model.dim()) +
           model.diffusion_integral(eps, t + eps) * model.omega_inv();
}

Matrix semiparam_kernel(const SemiParamModel& model, double eps, double t, double s) {
    const Matrix I = Matrix::Identity(model.dim(), model.dim());
    const Matrix ft = semiparam_f(model, eps, t);
    const Matrix fs = semiparam_f(model, eps, s);
    if (s <= t) return ft * (fs - I) * model.omega();
    return (ft - I) * fs * model.omega();
}

Matrix drift_mu0(const SemiParamModel& model, double t) {
    const Matrix denom = model.omega() + model.diffusion_integral(0.0, t);
    Eigen::FullPivLU<Matrix> lu(denom);
    if (!lu.isInvertible())
        throw NumericalError("drift_mu0: omega + integral singular at t=" + fmt(t));
    return model.diffusion_at(t) * lu.inverse();
}

} // namespace gmk
