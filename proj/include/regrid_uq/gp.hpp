#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "regrid_uq/grid.hpp"

namespace regrid_uq {

// Exponential-covariance GP parameters on the transformed scale:
// cov(s, s') = rho * exp(-||s - s'|| / theta_km), constant mean mu.
// jitter is a diagonal stabilizer; the model itself has no nugget.
struct CovParams {
    double rho = 1.0;       // sill, transformed-units^2
    double theta_km = 1.0;  // range, km
    double mu = 0.0;        // constant mean, transformed units
    double jitter = 0.0;    // >= 0, transformed-units^2
    bool degenerate = false;
};

// Kriging mean and conditional covariance of the target grid given one day's
// native-grid values.
struct ConditionalLaw {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // symmetric PSD
    int day_index = 0;
};

// rho * exp(-d/theta); jitter is added on the diagonal when d is square with
// a zero diagonal (a grid against itself).
Eigen::MatrixXd exp_cov(const DistanceMatrix& d, const CovParams& p);

// Negative log likelihood of independent daily replicates (rows of fields)
// under the constant-mean exponential-covariance model.
double neg_log_lik(const CovParams& p, const Grid& native, const Eigen::MatrixXd& fields);
double neg_log_lik(const CovParams& p, const DistanceMatrix& native_dist,
                   const Eigen::MatrixXd& fields);

// Profile-likelihood MLE: theta scanned on a log grid and refined by golden
// section; mu and rho are closed-form at each theta. jitter = 1e-8 * rho.
CovParams fit_mle(const Grid& native, const Eigen::MatrixXd& fields);

ConditionalLaw conditional_law(const CovParams& p, const Grid& native, const Grid& target,
                               const Eigen::VectorXd& native_values, int day_index = 0);

// n_draws rows, each mean + L*z with L a symmetric-PSD factor of cov and z
// standard normal from the counter stream keyed by (seed, draw index).
Eigen::MatrixXd conditional_simulate(const ConditionalLaw& law, int n_draws, std::uint64_t seed);

// Symmetric-PSD square root used by conditional_simulate; reusable when many
// draws share one covariance. Eigendecomposition with small negative
// eigenvalues clamped to zero; rejects eigenvalues below -1e-6 * trace.
class PsdFactor {
public:
    explicit PsdFactor(const Eigen::MatrixXd& cov);
    const Eigen::MatrixXd& factor() const { return factor_; }  // cov ~= F * F^T
    Eigen::VectorXd apply_to_normals(std::uint64_t key) const;

private:
    Eigen::MatrixXd factor_;
};

// Kriging operator pieces shared by every day of a (covariate, month) fit:
// conditional covariance and the weights mapping native values to target
// means. Conditional laws follow as mean = mu + W (v - mu).
struct KrigingOperator {
    Eigen::MatrixXd weights;   // |target| x |native|
    Eigen::MatrixXd cond_cov;  // |target| x |target|
    double mu = 0.0;

    Eigen::VectorXd mean_for(const Eigen::VectorXd& native_values) const;
};

KrigingOperator make_kriging_operator(const CovParams& p, const Grid& native, const Grid& target);

}  // namespace regrid_uq
