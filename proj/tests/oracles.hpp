// Test-only oracles, kept independent of the library's own linear-algebra
// paths: pseudo-inverses here go through Jacobi SVD, densities through a
// generic multivariate-normal routine, and optimizers are plain
// golden-section search.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd pinv(const MatrixXd& a, double tol_rel = 1e-12) {
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol_rel * (sv.size() ? sv.maxCoeff() : 0.0);
    VectorXd inv = VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cutoff) inv[i] = 1.0 / sv[i];
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// log N(x; mean, cov) with pseudo-determinant handling for singular cov.
inline double mvn_logpdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& cov) {
    Eigen::JacobiSVD<MatrixXd> svd(cov, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * (sv.size() ? sv.maxCoeff() : 0.0);
    const VectorXd d = x - mean;
    const VectorXd y = svd.matrixU().transpose() * d;
    double logdet = 0.0, quad = 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > cutoff) {
            ++rank;
            logdet += std::log(sv[i]);
            quad += y[i] * y[i] / sv[i];
        }
    }
    return -0.5 * (rank * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

struct Conditional {
    VectorXd mean;
    MatrixXd cov;
};

/// Condition a zero-mean joint Gaussian (given by its full covariance) on
/// the coordinates in obs_idx taking the values x_obs; returns the moments
/// of the coordinates in query_idx.
inline Conditional condition(const MatrixXd& joint_cov,
                             const std::vector<Eigen::Index>& obs_idx,
                             const VectorXd& x_obs,
                             const std::vector<Eigen::Index>& query_idx) {
    const auto no = static_cast<Eigen::Index>(obs_idx.size());
    const auto nq = static_cast<Eigen::Index>(query_idx.size());
    MatrixXd c_oo(no, no), c_qo(nq, no), c_qq(nq, nq);
    for (Eigen::Index i = 0; i < no; ++i)
        for (Eigen::Index j = 0; j < no; ++j)
            c_oo(i, j) = joint_cov(obs_idx[i], obs_idx[j]);
    for (Eigen::Index i = 0; i < nq; ++i) {
        for (Eigen::Index j = 0; j < no; ++j)
            c_qo(i, j) = joint_cov(query_idx[i], obs_idx[j]);
        for (Eigen::Index j = 0; j < nq; ++j)
            c_qq(i, j) = joint_cov(query_idx[i], query_idx[j]);
    }
    const MatrixXd g = pinv(c_oo);
    Conditional out;
    out.mean = c_qo * g * x_obs;
    out.cov = c_qq - c_qo * g * c_qo.transpose();
    return out;
}

/// Maximize a unimodal scalar function over [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Random symmetric positive definite matrix with eigenvalues in
/// roughly [0.3, ~m].
inline MatrixXd random_spd(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    MatrixXd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = gauss(rng);
    return a * a.transpose() / m + 0.3 * MatrixXd::Identity(m, m);
}

/// Random symmetric matrix (indefinite in general).
inline MatrixXd random_sym(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    MatrixXd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = gauss(rng);
    return 0.5 * (a + a.transpose());
}

/// Strictly increasing grid of n positive times.
inline std::vector<double> random_grid(std::size_t n, std::mt19937_64& rng,
                                       double start_max = 1.0, double step_max = 1.0) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::vector<double> t(n);
    double cur = unif(rng) * start_max;
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = cur;
        cur += unif(rng) * step_max;
    }
    return t;
}

} // namespace oracle
