#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "regrid_uq/bayes_lm.hpp"
#include "regrid_uq/errors.hpp"
#include "regrid_uq/rng.hpp"
#include "regrid_uq/stats.hpp"

using namespace regrid_uq;

namespace {

RegressionDesign random_design(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                               double noise_sd = 0.5) {
    rng::Stream s(seed);
    RegressionDesign d;
    d.X.resize(n, m + 1);
    d.X.col(0).setOnes();
    for (Eigen::Index k = 1; k <= m; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) d.X(i, k) = s.normal();
    }
    d.S.resize(n, 0);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mu = 1.0;
        for (Eigen::Index k = 1; k <= m; ++k) mu += 0.5 * static_cast<double>(k) * d.X(i, k);
        d.y(i) = mu + noise_sd * s.normal();
    }
    return d;
}

}  // namespace

TEST_CASE("ols_fit recovers exact linear data") {
    RegressionDesign d;
    d.X.resize(10, 2);
    d.X.col(0).setOnes();
    d.X.col(1) = Eigen::VectorXd::LinSpaced(10, 1.0, 10.0);
    d.S.resize(10, 0);
    d.y = 2.0 * d.X.col(1);
    const OlsFit fit = ols_fit(d);
    CHECK(fit.beta(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.beta(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.s2 == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("ols_fit intercept-only closed form") {
    RegressionDesign d;
    d.X = Eigen::MatrixXd::Ones(6, 1);
    d.S.resize(6, 0);
    d.y.resize(6);
    d.y << 1.0, 2.0, 4.0, 4.0, 5.0, 8.0;
    const OlsFit fit = ols_fit(d);
    const std::vector<double> yv(d.y.data(), d.y.data() + 6);
    CHECK(fit.beta(0) == doctest::Approx(stats::mean(yv)));
    CHECK(fit.s2 == doctest::Approx(stats::sample_variance(yv)).epsilon(1e-12));
}

TEST_CASE("ols_fit matches explicit normal equations on a random design") {
    const RegressionDesign d = random_design(50, 3, 77);
    const OlsFit fit = ols_fit(d);
    const Eigen::MatrixXd design = d.full_design();
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd oracle = gram.inverse() * design.transpose() * d.y;
    CHECK((fit.coefficients() - oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((fit.gram_inverse - gram.inverse()).cwiseAbs().maxCoeff() < 1e-8);
    const double rss = (d.y - design * oracle).squaredNorm();
    CHECK(fit.s2 == doctest::Approx(rss / (50 - 4)).epsilon(1e-10));
}

TEST_CASE("ols residuals are orthogonal to the design columns") {
    const RegressionDesign d = random_design(80, 4, 5);
    const OlsFit fit = ols_fit(d);
    const Eigen::MatrixXd design = d.full_design();
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        const double dot = std::fabs(fit.residuals.dot(design.col(j)));
        CHECK(dot <= 1e-8 * d.y.norm() * design.col(j).norm());
    }
}

TEST_CASE("ols_fit names dependent columns") {
    RegressionDesign d;
    d.X.resize(20, 3);
    d.X.col(0).setOnes();
    d.X.col(1) = Eigen::VectorXd::LinSpaced(20, 0.0, 1.0);
    d.X.col(2) = 2.0 * d.X.col(1);  // dependent
    d.S.resize(20, 0);
    d.y = Eigen::VectorXd::Random(20);
    CHECK_THROWS_WITH_AS(ols_fit(d), doctest::Contains("dependent column"), NumericError);
}

TEST_CASE("ols_fit rejects k >= n and shape mismatches") {
    RegressionDesign d;
    d.X = Eigen::MatrixXd::Ones(3, 3);
    d.S.resize(3, 0);
    d.y = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(ols_fit(d), ValidationError);
    d.X = Eigen::MatrixXd::Ones(4, 1);
    CHECK_THROWS_AS(ols_fit(d), ValidationError);
}

TEST_CASE("sample_sigma2 degenerate and error cases") {
    CHECK(sample_sigma2(100, 4, 0.0, 9) == 0.0);
    CHECK_THROWS_AS(sample_sigma2(4, 4, 1.0, 9), ValidationError);
    CHECK_THROWS_AS(sample_sigma2(10, 4, -1.0, 9), ValidationError);
    CHECK(sample_sigma2(104, 4, 1.0, 9) == sample_sigma2(104, 4, 1.0, 9));
    CHECK(sample_sigma2(104, 4, 1.0, 9) != sample_sigma2(104, 4, 1.0, 10));
}

TEST_CASE("sample_sigma2 matches the scaled inverse chi-square mean") {
    // E[(n-k) s^2 / chi2_{n-k}] = (n-k)/(n-k-2) * s^2 at n-k = 100.
    const int n = 104, k = 4;
    const int n_draws = 10000;
    double sum = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        sum += sample_sigma2(n, k, 1.0, rng::derive(31415, static_cast<std::uint64_t>(i)));
    }
    CHECK(sum / n_draws == doctest::Approx(100.0 / 98.0).epsilon(0.02));
}

TEST_CASE("sample_coefficients zero-variance limit and reproducibility") {
    Eigen::VectorXd beta_hat(2);
    beta_hat << 1.0, -2.0;
    Eigen::VectorXd gamma_hat(1);
    gamma_hat << 0.5;
    const Eigen::MatrixXd gram_inv = Eigen::MatrixXd::Identity(3, 3) * 0.1;
    const auto [b0, g0] = sample_coefficients(beta_hat, gamma_hat, gram_inv, 0.0, 1);
    CHECK((b0 - beta_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g0 - gamma_hat).cwiseAbs().maxCoeff() == 0.0);

    const auto [b1, g1] = sample_coefficients(beta_hat, gamma_hat, gram_inv, 2.0, 7);
    const auto [b2, g2] = sample_coefficients(beta_hat, gamma_hat, gram_inv, 2.0, 7);
    CHECK((b1 - b2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd bad = gram_inv;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(sample_coefficients(beta_hat, gamma_hat, bad, 1.0, 1), ValidationError);
}

TEST_CASE("sample_coefficients Monte Carlo covariance matches sigma2 * gram inverse") {
    const RegressionDesign d = random_design(60, 2, 404);
    const OlsFit fit = ols_fit(d);
    const double sigma2 = 1.7;
    const int n_draws = 10000;
    Eigen::MatrixXd draws(n_draws, 3);
    for (int i = 0; i < n_draws; ++i) {
        const auto [b, g] = sample_coefficients(fit.beta, fit.gamma, fit.gram_inverse, sigma2,
                                                rng::derive(606, static_cast<std::uint64_t>(i)));
        draws.row(i) = b.transpose();
    }
    const Eigen::VectorXd mean = draws.colwise().mean();
    CHECK((mean - fit.beta).cwiseAbs().maxCoeff() <
          4.0 * std::sqrt(sigma2 * fit.gram_inverse.diagonal().maxCoeff() / n_draws));
    const Eigen::MatrixXd centered = draws.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n_draws - 1);
    const Eigen::MatrixXd expected = sigma2 * fit.gram_inverse;
    CHECK((cov - expected).norm() <= 0.05 * expected.norm());
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(cov(j, j) == doctest::Approx(expected(j, j)).epsilon(0.05));
    }
}

TEST_CASE("pooled posterior mean converges to the OLS estimate") {
    const RegressionDesign d = random_design(120, 2, 2020);
    const OlsFit fit = ols_fit(d);
    const int n_draws = 10000;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < n_draws; ++i) {
        const double s2 = sample_sigma2(static_cast<int>(fit.n), static_cast<int>(fit.k), fit.s2,
                                        rng::derive(1, static_cast<std::uint64_t>(i)));
        CHECK(s2 > 0.0);
        const auto [b, g] = sample_coefficients(fit.beta, fit.gamma, fit.gram_inverse, s2,
                                                rng::derive(2, static_cast<std::uint64_t>(i)));
        mean += b;
    }
    mean /= n_draws;
    const double se = std::sqrt(fit.s2 * fit.gram_inverse.diagonal().maxCoeff() / n_draws);
    CHECK((mean - fit.beta).cwiseAbs().maxCoeff() < 5.0 * se);
}

namespace {

std::vector<PosteriorDraw> make_draws(const OlsFit& fit, int n_draws, std::uint64_t seed) {
    std::vector<PosteriorDraw> draws;
    draws.reserve(static_cast<std::size_t>(n_draws));
    for (int i = 0; i < n_draws; ++i) {
        const double s2 =
            sample_sigma2(static_cast<int>(fit.n), static_cast<int>(fit.k), fit.s2,
                          rng::derive_path(seed, {1, static_cast<std::uint64_t>(i)}));
        auto [b, g] = sample_coefficients(fit.beta, fit.gamma, fit.gram_inverse, s2,
                                          rng::derive_path(seed, {2, static_cast<std::uint64_t>(i)}));
        draws.push_back({std::move(b), std::move(g), s2, std::nullopt});
    }
    return draws;
}

}  // namespace

TEST_CASE("predictive_interval degenerate and ordering properties") {
    Eigen::VectorXd beta(2);
    beta << 1.0, 2.0;
    std::vector<PosteriorDraw> identical(150, PosteriorDraw{beta, Eigen::VectorXd(0), 0.0, {}});
    Eigen::VectorXd x(2);
    x << 1.0, 3.0;
    const auto [lo, hi] = predictive_interval(identical, x, 0.95, 5);
    CHECK(lo == doctest::Approx(7.0));
    CHECK(hi == doctest::Approx(7.0));

    const RegressionDesign d = random_design(100, 1, 33);
    const OlsFit fit = ols_fit(d);
    const auto draws = make_draws(fit, 2000, 999);
    Eigen::VectorXd xn(2);
    xn << 1.0, 0.7;
    const auto iv90 = predictive_interval(draws, xn, 0.90, 4);
    const auto iv99 = predictive_interval(draws, xn, 0.99, 4);
    CHECK(iv99.first < iv90.first);
    CHECK(iv99.second > iv90.second);

    CHECK_THROWS_AS(predictive_interval(std::vector<PosteriorDraw>(50), xn, 0.95, 1),
                    ValidationError);
}

TEST_CASE("predictive intervals achieve nominal coverage on fresh days") {
    // Train on n=150, test on 1000 fresh days from the same truth.
    rng::Stream s(616);
    const Eigen::Index n = 150;
    RegressionDesign d;
    d.X.resize(n, 2);
    d.X.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i) d.X(i, 1) = s.normal();
    d.S.resize(n, 0);
    d.y.resize(n);
    const double sigma = 0.8;
    for (Eigen::Index i = 0; i < n; ++i) d.y(i) = 0.3 + 1.5 * d.X(i, 1) + sigma * s.normal();
    const OlsFit fit = ols_fit(d);
    const auto draws = make_draws(fit, 1000, 31);

    int inside = 0;
    const int n_test = 1000;
    for (int t = 0; t < n_test; ++t) {
        Eigen::VectorXd x(2);
        x << 1.0, s.normal();
        const double actual = 0.3 + 1.5 * x(1) + sigma * s.normal();
        const auto [lo, hi] =
            predictive_interval(draws, x, 0.95, rng::derive(52, static_cast<std::uint64_t>(t)));
        if (lo <= actual && actual <= hi) ++inside;
    }
    const double cov = static_cast<double>(inside) / n_test;
    CHECK(cov >= 0.92);
    CHECK(cov <= 0.97);
}
