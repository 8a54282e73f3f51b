#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace regrid_uq {

// Design for one (location, month) regression. X carries the leading
// intercept column plus M covariate columns; S holds optional seasonal
// columns and may have zero columns.
struct RegressionDesign {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    Eigen::MatrixXd S;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index k() const { return X.cols() + S.cols(); }
    Eigen::MatrixXd full_design() const;
};

struct OlsFit {
    Eigen::VectorXd beta;          // X coefficients, intercept first
    Eigen::VectorXd gamma;         // S coefficients (possibly empty)
    double s2 = 0.0;               // RSS / (n - k)
    Eigen::VectorXd residuals;
    Eigen::MatrixXd gram_inverse;  // ([X S]^T [X S])^-1
    Eigen::Index n = 0;
    Eigen::Index k = 0;

    double dof() const { return static_cast<double>(n - k); }
    Eigen::VectorXd coefficients() const;  // concatenated (beta, gamma)
};

// One sample of the regression posterior.
struct PosteriorDraw {
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;
    double sigma2 = 0.0;
    std::optional<double> eta;
};

// OLS point estimates and the pieces the conjugate posterior needs. Throws
// NumericError naming the offending columns when [X S] is rank deficient
// (relative tolerance 1e-10).
OlsFit ols_fit(const RegressionDesign& d);

// Scaled inverse chi-square draw: (n-k) * s2 / chi2_{n-k}.
double sample_sigma2(int n, int k, double s2, std::uint64_t seed);

// One MN((beta_hat, gamma_hat), sigma2 * gram_inverse) draw, split back into
// (beta, gamma) pieces of the given lengths.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_coefficients(
    const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& gamma_hat,
    const Eigen::MatrixXd& gram_inverse, double sigma2, std::uint64_t seed);

// Posterior-predictive samples at covariate row x_new (length M+1+|gamma|):
// one simulated y per draw, x_new^T (beta, gamma) + N(0, sigma2).
Eigen::VectorXd predictive_samples(std::span<const PosteriorDraw> draws,
                                   const Eigen::VectorXd& x_new, std::uint64_t seed);

// Empirical ((1-level)/2, (1+level)/2) quantiles of the predictive samples.
// Requires at least 100 draws.
std::pair<double, double> predictive_interval(std::span<const PosteriorDraw> draws,
                                              const Eigen::VectorXd& x_new, double level,
                                              std::uint64_t seed);

}  // namespace regrid_uq
