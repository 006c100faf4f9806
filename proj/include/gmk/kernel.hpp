#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "gmk/errors.hpp"

namespace gmk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// Relative tolerance for symmetry checks on parameter matrices.
inline constexpr double kSymmetryTol = 1e-12;

/// Minimum eigenvalue above -kPsdTol * |trace| is treated as PSD.
inline constexpr double kPsdTol = 1e-10;

/// Moore-Penrose pseudo-inverse of a symmetric matrix, eigenvalues below
/// tol_rel * max|eig| treated as zero.
Matrix pseudo_inverse(const Matrix& a, double tol_rel = 1e-12);

/// Symmetric PSD square root.
Matrix psd_sqrt(const Matrix& a);

/// min eigenvalue >= -kPsdTol * |trace| (and trace not negative beyond noise).
bool is_psd(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol_rel = kSymmetryTol);

/// Strictly increasing positive sample times. The process origin
/// X(0) = 0 is implicit and never stored.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    double last() const { return times_.back(); }

private:
    std::vector<double> times_;
};

/// Parameters of the stationary-increment kernel s(alpha - beta t) on
/// [0, horizon). alpha and beta must be symmetric; alpha - beta*t must
/// stay positive (semi-)definite over the working horizon. beta itself
/// is not sign-constrained: fitted beta is often negative definite and
/// every formula below remains valid.
class KernelParams {
public:
    KernelParams(Matrix alpha, Matrix beta, double horizon = kInfiniteHorizon);

    const Matrix& alpha() const { return alpha_; }
    const Matrix& beta() const { return beta_; }
    double horizon() const { return horizon_; }
    int dim() const { return static_cast<int>(alpha_.rows()); }

    /// alpha - beta*t, the per-unit-s slice of the kernel.
    Matrix slice(double t) const { return alpha_ - beta_ * t; }

    /// On-demand admissibility probe: alpha - beta*t PSD at the given time.
    bool admissible_at(double t) const;

private:
    Matrix alpha_;
    Matrix beta_;
    double horizon_;
};

/// Semi-parametric model (omega, piecewise-constant diffusion table).
/// breakpoints[0] must be 0; diffusion_blocks[k] is sigma0*sigma0^T on
/// [breakpoints[k], breakpoints[k+1]), the last block extending to +inf.
class SemiParamModel {
public:
    SemiParamModel(Matrix omega, std::vector<double> breakpoints,
                   std::vector<Matrix> diffusion_blocks);

    const Matrix& omega() const { return omega_; }
    const Matrix& omega_inv() const { return omega_inv_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Matrix>& diffusion_blocks() const { return blocks_; }
    int dim() const { return static_cast<int>(omega_.rows()); }

    /// sigma0*sigma0^T at time t.
    const Matrix& diffusion_at(double t) const;

    /// Closed-form integral of sigma0*sigma0^T over [a, b].
    Matrix diffusion_integral(double a, double b) const;

private:
    Matrix omega_;
    Matrix omega_inv_;
    std::vector<double> breakpoints_;
    std::vector<Matrix> blocks_;
};

struct ConditionalMoments {
    Vector mean;
    Matrix cov;
};

/// Gamma(t, s) = s(alpha - beta t) for s <= t, transpose-symmetric otherwise.
Matrix kernel_eval(const KernelParams& params, double t, double s);

/// (m n) x (m n) block covariance of the sampled vectors over the grid.
Matrix gram(const KernelParams& params, const TimeGrid& grid);

/// Moments of X(t), and cross-covariance between times t and s, conditional
/// on X(u) = x_u. Forward (t, s >= u) or backward (t, s <= u) queries;
/// the generalized inverse is the Moore-Penrose pseudo-inverse.
ConditionalMoments conditional_moments(const KernelParams& params, double u,
                                       const Vector& x_u, double t, double s);

/// Matrix-scaled Brownian bridge moments: conditioning a process with kernel
/// min(s,t)*alpha on X(u) = x_u, for 0 <= s, t <= u. mean = (t/u) x_u,
/// cov = (1 - max(t,s)/u) * min(t,s) * alpha; independent of x_u.
ConditionalMoments bridge_moments(const Matrix& alpha, double u,
                                  const Vector& x_u, double t, double s);

/// f_eps(t) = I + (integral of sigma0 sigma0^T over [eps, t+eps]) omega^{-1}.
Matrix semiparam_f(const SemiParamModel& model, double eps, double t);

/// Gamma_eps(t, s) = f_eps(t)(f_eps(s) - I) omega for s <= t,
/// (f_eps(t) - I) f_eps(s) omega for s > t.
Matrix semiparam_kernel(const SemiParamModel& model, double eps, double t, double s);

/// Drift matrix mu0(t) = sigma0 sigma0^T(t) (omega + integral_0^t sigma0 sigma0^T)^{-1}.
Matrix drift_mu0(const SemiParamModel& model, double t);

} // namespace gmk
