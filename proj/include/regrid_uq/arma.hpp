#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "regrid_uq/bayes_lm.hpp"

namespace regrid_uq {

// ARMA(p,q) spec for the error process. The AR polynomial must be causal
// (all roots outside the unit circle); truncation is the number of MA(inf)
// terms retained by autocov.
struct ArmaSpec {
    std::vector<double> ar;
    std::vector<double> ma;
    int truncation = 1;
};

// Single-parameter error families exposed by the study pipeline.
enum class ArmaFamily { ar1, ma1 };

// MA(inf) expansion: a_0 = 1, a_j = theta_j + sum_i phi_i a_{j-i}.
std::vector<double> ma_inf_coeffs(const ArmaSpec& spec);

// gamma(h) = sigma2 * sum_j a_j a_{j+h}, h = 0..maxlag.
// Requires truncation >= maxlag + 50 to bound the tail error.
std::vector<double> autocov(const ArmaSpec& spec, double sigma2, int maxlag);

// Toeplitz correlation matrix Omega_ij = gamma(|i-j|)/gamma(0).
Eigen::MatrixXd build_omega(const ArmaSpec& spec, int n);

Eigen::MatrixXd build_omega(ArmaFamily family, double eta, int n);

// Unnormalized log marginal posterior of the error parameter:
// -((n-p)/2 + 1) log SS + 1/2 log det(X^T Omega^-1 X) - 1/2 log det Omega,
// SS the Omega-weighted residual sum of squares, p the coefficient count.
double eta_log_marginal(double eta, const RegressionDesign& d, ArmaFamily family);

// Discrete posterior on an equispaced eta grid over (-0.99, 0.99).
struct EtaPosterior {
    std::vector<double> grid;
    std::vector<double> log_density;
    std::vector<double> weights;  // normalized
};

EtaPosterior eta_posterior(const RegressionDesign& d, ArmaFamily family, int grid_points = 199);

// CSV export, header eta,log_density,weight.
void write_eta_posterior(const std::string& path, const EtaPosterior& post);

// Inverse-CDF draw from the discrete grid posterior.
double sample_eta(const EtaPosterior& post, std::uint64_t seed);

// GLS-to-OLS reduction via the symmetric inverse square root of omega.
RegressionDesign whiten(const RegressionDesign& d, const Eigen::MatrixXd& omega);

// O(n)-per-application whitener for the single-parameter families, used on
// the hot path (eta grid scans, per-draw whitening). Any W with
// W Omega W^T = I gives the same GLS quantities; this one is triangular,
// not the symmetric root.
class FamilyWhitener {
public:
    FamilyWhitener(ArmaFamily family, double eta, Eigen::Index n);

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
    RegressionDesign apply(const RegressionDesign& d) const;
    double log_det_omega() const { return log_det_omega_; }

private:
    ArmaFamily family_;
    double eta_;
    Eigen::Index n_;
    double log_det_omega_ = 0.0;
    // MA(1) bidiagonal Cholesky of Omega: diag e_i, subdiag f_i.
    Eigen::VectorXd chol_diag_, chol_sub_;
};

// AIC/BIC diagnostic over ARMA orders (p,q) in {0,1,2}^2, fitted to a
// residual series by profile Gaussian likelihood with Omega built from the
// MA(inf) autocovariance.
struct ArmaOrderEntry {
    int p = 0;
    int q = 0;
    double aic = 0.0;
    double bic = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
};

std::vector<ArmaOrderEntry> arma_order_report(const Eigen::VectorXd& residuals);

}  // namespace regrid_uq
