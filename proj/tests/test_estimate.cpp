#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmk/estimate.hpp"
#include "gmk/forecast.hpp"
#include "oracles.hpp"

using gmk::FitReport;
using gmk::KernelParams;
using gmk::Matrix;
using gmk::SampleSet;
using gmk::TimeGrid;
using gmk::Vector;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

SampleSet scalar_samples(std::vector<double> t, const std::vector<double>& x) {
    Matrix values(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        values(0, static_cast<Eigen::Index>(i)) = x[i];
    return SampleSet(TimeGrid(std::move(t)), values);
}

SampleSet random_samples(int m, std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix values(m, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = gauss(rng);
    return SampleSet(TimeGrid(oracle::random_grid(n, rng)), values);
}

// conditional bridge log-likelihood L1 of the interior samples given the
// endpoint, as a function of a scalar alpha (dense oracle, Kronecker
// structure written out by hand)
double bridge_loglik_scalar(const SampleSet& data, double alpha) {
    const auto n = static_cast<Eigen::Index>(data.size());
    const double t_n = data.grid().last();
    const double x_n = data.values()(0, n - 1);
    const Eigen::Index k = n - 1;
    Eigen::VectorXd mean(k);
    Eigen::MatrixXd cov(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        mean[i] = data.grid()[static_cast<std::size_t>(i)] / t_n * x_n;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double lo = std::min(data.grid()[i], data.grid()[j]);
            const double hi = std::max(data.grid()[i], data.grid()[j]);
            cov(i, j) = lo * (1.0 - hi / t_n) * alpha;
        }
    }
    Eigen::VectorXd x(k);
    for (Eigen::Index i = 0; i < k; ++i) x[i] = data.values()(0, i);
    return oracle::mvn_logpdf(x, mean, cov);
}

} // namespace

TEST_CASE("fit worked examples") {
    auto r1 = gmk::fit(scalar_samples({1.0, 2.0}, {1.0, 3.0}));
    CHECK(r1.alpha_hat(0, 0) == doctest::Approx(0.5));
    CHECK(r1.beta_hat(0, 0) == doctest::Approx(-2.0));

    auto r2 = gmk::fit(scalar_samples({1.0, 2.0, 4.0}, {1.0, 2.0, 2.0}));
    CHECK(r2.alpha_hat(0, 0) == doctest::Approx(0.5));
    CHECK(r2.beta_hat(0, 0) == doctest::Approx(-0.125));

    // collinear data x_i = t_i * v annihilates every increment term
    std::mt19937_64 rng(5);
    Vector v(3);
    v << 0.4, -1.2, 2.0;
    TimeGrid grid({0.5, 1.0, 2.5, 3.0});
    Matrix values(3, 4);
    for (int i = 0; i < 4; ++i) values.col(i) = grid[i] * v;
    auto r3 = gmk::fit(SampleSet(grid, values));
    CHECK(r3.alpha_hat.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((r3.beta_hat + v * v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fit rejects insufficient data") {
    CHECK_THROWS_AS(gmk::fit(scalar_samples({1.0}, {1.0})), gmk::InvalidInput);
    CHECK_THROWS_AS(scalar_samples({1.0, 1.0}, {1.0, 2.0}), gmk::InvalidInput);
}

TEST_CASE("fit report invariants") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const auto data = random_samples(m, 2 + rng() % 5, rng);
        const auto r = gmk::fit(data);

        CHECK((r.alpha_hat - r.alpha_hat.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, r.alpha_hat.cwiseAbs().maxCoeff()));
        CHECK((r.beta_hat - r.beta_hat.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, r.beta_hat.cwiseAbs().maxCoeff()));

        Eigen::SelfAdjointEigenSolver<Matrix> es(r.alpha_hat, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, r.alpha_hat.trace()));

        // identity: t_n (alpha_hat - beta_hat t_n) = x_n x_n^T
        const Matrix lhs = r.t_last * (r.alpha_hat - r.beta_hat * r.t_last);
        const Matrix rhs = r.x_last * r.x_last.transpose();
        const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_CASE("update worked example and batch equivalence") {
    auto base = gmk::fit(scalar_samples({1.0, 2.0}, {1.0, 3.0}));
    auto r = gmk::update(base, 4.0, Vector::Constant(1, 2.0));
    CHECK(r.alpha_hat(0, 0) == doctest::Approx(2.25));
    CHECK(r.beta_hat(0, 0) == doctest::Approx(0.3125));

    auto batch = gmk::fit(scalar_samples({1.0, 2.0, 4.0}, {1.0, 3.0, 2.0}));
    CHECK(r.alpha_hat(0, 0) == doctest::Approx(batch.alpha_hat(0, 0)).epsilon(1e-14));
    CHECK(r.beta_hat(0, 0) == doctest::Approx(batch.beta_hat(0, 0)).epsilon(1e-14));

    // collinear extension adds a zero term: alpha shrinks by (n-1)/n
    auto ext = gmk::update(base, 3.0, Vector::Constant(1, 4.5));
    CHECK(ext.alpha_hat(0, 0) == doctest::Approx(0.25));

    CHECK_THROWS_AS(gmk::update(base, 2.0, Vector::Constant(1, 1.0)),
                    gmk::InvalidInput);
}

TEST_CASE("streaming equals batch over random append sequences") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 3 + rng() % 6;
        const auto data = random_samples(m, n, rng);

        auto streamed = gmk::fit(SampleSet(
            TimeGrid({data.grid()[0], data.grid()[1]}),
            data.values().leftCols(2)));
        for (std::size_t i = 2; i < n; ++i)
            streamed = gmk::update(streamed, data.grid()[i], data.values().col(i));

        const auto batch = gmk::fit(data);
        const double scale = std::max(1.0, batch.alpha_hat.cwiseAbs().maxCoeff());
        CHECK((streamed.alpha_hat - batch.alpha_hat).cwiseAbs().maxCoeff() <=
              1e-12 * scale);
        CHECK((streamed.beta_hat - batch.beta_hat).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, batch.beta_hat.cwiseAbs().maxCoeff()));
        CHECK(streamed.n == batch.n);
    }
}

TEST_CASE("loglik worked examples") {
    KernelParams brownian(scalar(1.0), scalar(0.0));
    CHECK(gmk::loglik(brownian, scalar_samples({1.0}, {0.0})) ==
          doctest::Approx(-0.9189385332046727));
    CHECK(gmk::loglik(brownian, scalar_samples({1.0}, {1.0})) ==
          doctest::Approx(-1.4189385332046727));
}

TEST_CASE("loglik matches the dense MVN oracle") {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 25; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 2);
        const auto data = random_samples(m, 3, rng);
        const Matrix alpha = oracle::random_spd(m, rng);
        const Matrix beta = -oracle::random_spd(m, rng);
        KernelParams params(alpha, beta);

        const Matrix g = gmk::gram(params, data.grid());
        Eigen::VectorXd x(m * 3);
        for (int i = 0; i < 3; ++i) x.segment(i * m, m) = data.values().col(i);
        const double expected =
            oracle::mvn_logpdf(x, Eigen::VectorXd::Zero(x.size()), g);
        CHECK(gmk::loglik(params, data) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("loglik returns -infinity off the support of a degenerate Gram") {
    // beta = alpha / t pins X(t) to zero variance direction combinations;
    // easiest degenerate case: horizon-touching singular variance
    Matrix alpha(2, 2);
    alpha << 1.0, 0.0, 0.0, 1.0;
    Matrix beta = alpha / 2.0;
    KernelParams params(alpha, beta, 2.0 * (1.0 + 1e-9));

    // at t=2 the variance 2(alpha - 2 beta) = 0: only x=0 is in support
    Matrix zero(2, 1);
    zero.setZero();
    const double ok = gmk::loglik(params, SampleSet(TimeGrid({2.0}), zero));
    CHECK(std::isfinite(ok));

    Matrix off(2, 1);
    off << 0.1, 0.0;
    CHECK(gmk::loglik(params, SampleSet(TimeGrid({2.0}), off)) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("bridge_fit worked examples") {
    const auto a = gmk::bridge_fit(scalar_samples({1.0}, {1.0}), 2.0,
                                   Vector::Constant(1, 3.0));
    CHECK(a(0, 0) == doctest::Approx(0.5));

    // interior points exactly on the chord give a zero estimate
    Vector end(2);
    end << 2.0, -4.0;
    TimeGrid grid({0.5, 1.0});
    Matrix values(2, 2);
    values.col(0) = 0.25 * end;
    values.col(1) = 0.5 * end;
    const auto z = gmk::bridge_fit(SampleSet(grid, values), 2.0, end);
    CHECK(z.cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(gmk::bridge_fit(scalar_samples({1.0, 3.0}, {1.0, 1.0}), 2.0,
                                    Vector::Constant(1, 1.0)),
                    gmk::DomainError);
}

TEST_CASE("bridge_fit equals the full-sample estimator") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 3 + rng() % 4;
        const auto data = random_samples(m, n, rng);

        const auto interior = SampleSet(
            TimeGrid(std::vector<double>(data.grid().times().begin(),
                                         data.grid().times().end() - 1)),
            data.values().leftCols(static_cast<Eigen::Index>(n - 1)));
        const Matrix via_bridge = gmk::bridge_fit(interior, data.grid().last(),
                                                  data.values().col(n - 1));
        const Matrix via_fit = gmk::fit(data).alpha_hat;
        const double scale = std::max(1.0, via_fit.cwiseAbs().maxCoeff());
        CHECK((via_bridge - via_fit).cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
}

TEST_CASE("bridge_fit matches the numeric conditional MLE") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 10; ++rep) {
        const auto data = random_samples(1, 3, rng);
        const double fitted = gmk::fit(data).alpha_hat(0, 0);
        const double numeric = oracle::golden_section_max(
            [&](double a) { return bridge_loglik_scalar(data, a); },
            1e-6, std::max(10.0, 20.0 * fitted), 1e-9);
        CHECK(numeric == doctest::Approx(fitted).epsilon(1e-6));
    }
}

TEST_CASE("MLE optimality against random perturbations") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t n = 3 + rng() % 4;
        const auto data = random_samples(1, n, rng);
        const auto r = gmk::fit(data);
        if (r.alpha_hat(0, 0) < 1e-8) continue;

        const double horizon =
            std::max(gmk::max_horizon(r), r.t_last * (1.0 + 1e-9));
        const double best =
            gmk::loglik(KernelParams(r.alpha_hat, r.beta_hat, horizon), data);

        std::uniform_real_distribution<double> unif(-0.5, 0.5);
        int tried = 0;
        while (tried < 100) {
            const double a = r.alpha_hat(0, 0) * (1.0 + unif(rng));
            const double b = r.beta_hat(0, 0) + unif(rng);
            if (a <= 0.0) continue;
            const double h = gmk::max_horizon(scalar(a), scalar(b));
            if (h <= r.t_last) continue;
            ++tried;
            const double ll =
                gmk::loglik(KernelParams(scalar(a), scalar(b), h), data);
            CHECK(ll <= best + 1e-9 * std::abs(best));
        }
    }
}

TEST_CASE("data-scale and time-scale equivariance") {
    std::mt19937_64 rng(59);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 2 + rng() % 5;
        const auto data = random_samples(m, n, rng);
        const auto base = gmk::fit(data);

        std::normal_distribution<double> gauss;
        Matrix c(m, m);
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
        const auto scaled = gmk::fit(SampleSet(data.grid(), c * data.values()));
        const double s1 = std::max(1.0, (c * base.alpha_hat * c.transpose()).cwiseAbs().maxCoeff());
        CHECK((scaled.alpha_hat - c * base.alpha_hat * c.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * s1);
        const double s2 = std::max(1.0, (c * base.beta_hat * c.transpose()).cwiseAbs().maxCoeff());
        CHECK((scaled.beta_hat - c * base.beta_hat * c.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * s2);

        const double lambda = 0.25 + 3.0 * std::uniform_real_distribution<double>()(rng);
        std::vector<double> scaled_t = data.grid().times();
        for (double& t : scaled_t) t *= lambda;
        const auto time_scaled = gmk::fit(SampleSet(TimeGrid(scaled_t), data.values()));
        CHECK((time_scaled.alpha_hat - base.alpha_hat / lambda).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, base.alpha_hat.cwiseAbs().maxCoeff()));
        CHECK((time_scaled.beta_hat - base.beta_hat / (lambda * lambda)).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, base.beta_hat.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("loglik depends on the data only through the sufficient statistics") {
    // two distinct scalar datasets on the same grid engineered to share
    // (alpha_hat, beta_hat): x3 fixed by beta_hat, x2 free, x1 solved
    const std::vector<double> grid{1.0, 2.0, 3.0};
    const double target_alpha = 1.2, target_beta = 0.1;
    const double x3 = std::sqrt(9.0 * (target_alpha / 3.0 - target_beta));

    auto solve_x1 = [&](double x2) {
        // term2 = (3 x2 - 2 x3)^2 / 6; term1 = (2 x1 - x2)^2 / 2
        const double term2 = (3.0 * x2 - 2.0 * x3) * (3.0 * x2 - 2.0 * x3) / 6.0;
        const double term1 = 2.0 * target_alpha - term2;
        REQUIRE(term1 >= 0.0);
        return (std::sqrt(2.0 * term1) + x2) / 2.0;
    };

    const double x2a = 0.9, x2b = 0.4;
    const auto da = scalar_samples(std::vector<double>(grid), {solve_x1(x2a), x2a, x3});
    const auto db = scalar_samples(std::vector<double>(grid), {solve_x1(x2b), x2b, x3});

    const auto ra = gmk::fit(da);
    const auto rb = gmk::fit(db);
    REQUIRE(ra.alpha_hat(0, 0) == doctest::Approx(target_alpha));
    REQUIRE(rb.alpha_hat(0, 0) == doctest::Approx(target_alpha));
    REQUIRE(ra.beta_hat(0, 0) == doctest::Approx(rb.beta_hat(0, 0)));
    CHECK(std::abs(da.values()(0, 0) - db.values()(0, 0)) > 1e-3); // truly distinct

    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 5; ++rep) {
        std::uniform_real_distribution<double> unif(0.5, 2.0);
        const double a = unif(rng);
        const double b = -unif(rng);
        KernelParams params(scalar(a), scalar(b));
        CHECK(gmk::loglik(params, da) ==
              doctest::Approx(gmk::loglik(params, db)).epsilon(1e-8));
    }
}
