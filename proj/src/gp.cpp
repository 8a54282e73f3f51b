#include "regrid_uq/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "regrid_uq/errors.hpp"
#include "regrid_uq/log.hpp"
#include "regrid_uq/rng.hpp"

namespace regrid_uq {

namespace {

constexpr double kRhoFloor = 1e-12;
constexpr double kRelJitter = 1e-8;
constexpr int kThetaGridPoints = 60;
constexpr double kThetaRelTol = 1e-4;
constexpr int kMaxJitterEscalations = 3;

bool has_zero_diagonal(const Eigen::MatrixXd& d) {
    if (d.rows() != d.cols()) return false;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (std::fabs(d(i, i)) > 1e-12) return false;
    }
    return true;
}

// LLT with jitter escalation (x10, up to kMaxJitterEscalations) on failure.
// base is the matrix without its stabilizing diagonal; jitter0 the starting
// diagonal value.
Eigen::LLT<Eigen::MatrixXd> llt_with_escalation(const Eigen::MatrixXd& base, double jitter0,
                                                const char* what) {
    double jitter = jitter0;
    for (int attempt = 0; attempt <= kMaxJitterEscalations; ++attempt) {
        Eigen::MatrixXd k = base;
        k.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            if (attempt > 0) {
                log::debug(what, ": jitter escalated to ", jitter);
            }
            return llt;
        }
        jitter = (jitter > 0.0) ? jitter * 10.0 : 1e-12;
    }
    throw NumericError(std::string(what) + ": covariance ill-conditioned after jitter escalation");
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct ProfileResult {
    double nll = 0.0;
    double mu = 0.0;
    double rho = 0.0;
};

// Closed-form profile over (mu, rho) at fixed theta. The correlation matrix
// carries the relative jitter, so K = rho * (C + kRelJitter I) keeps
// jitter = kRelJitter * rho.
ProfileResult profile_at_theta(double theta, const Eigen::MatrixXd& dist,
                               const Eigen::MatrixXd& fields) {
    const auto n = dist.rows();
    const auto days = fields.rows();
    Eigen::MatrixXd corr = (-dist / theta).array().exp();
    const auto llt = llt_with_escalation(corr, kRelJitter, "fit_mle");

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd ci_ones = llt.solve(ones);
    const Eigen::VectorXd col_mean = fields.colwise().mean();
    const double denom = ones.dot(ci_ones);
    const double mu = ci_ones.dot(col_mean) / denom;

    double quad = 0.0;
    for (Eigen::Index t = 0; t < days; ++t) {
        const Eigen::VectorXd r = fields.row(t).transpose() - mu * ones;
        quad += r.dot(llt.solve(r));
    }
    const double tn = static_cast<double>(days) * static_cast<double>(n);
    const double rho = std::max(quad / tn, kRhoFloor);

    const double nll = 0.5 * static_cast<double>(days) *
                           (static_cast<double>(n) * std::log(rho) + log_det_from_llt(llt)) +
                       0.5 * tn + 0.5 * tn * std::log(2.0 * std::numbers::pi);
    return {nll, mu, rho};
}

}  // namespace

Eigen::MatrixXd exp_cov(const DistanceMatrix& d, const CovParams& p) {
    if (!(p.rho > 0.0) || !(p.theta_km > 0.0) || p.jitter < 0.0) {
        throw ValidationError("exp_cov: invalid covariance parameters");
    }
    Eigen::MatrixXd k = p.rho * (-d.km / p.theta_km).array().exp();
    if (has_zero_diagonal(d.km)) {
        k.diagonal().array() += p.jitter;
    }
    return k;
}

double neg_log_lik(const CovParams& p, const Grid& native, const Eigen::MatrixXd& fields) {
    return neg_log_lik(p, pairwise_distances(native, native), fields);
}

double neg_log_lik(const CovParams& p, const DistanceMatrix& native_dist,
                   const Eigen::MatrixXd& fields) {
    const auto n = native_dist.km.rows();
    if (fields.cols() != n) throw ValidationError("neg_log_lik: field width != grid size");
    if (fields.rows() < 1) throw ValidationError("neg_log_lik: need at least one day");

    Eigen::MatrixXd base = p.rho * (-native_dist.km / p.theta_km).array().exp();
    const auto llt = llt_with_escalation(base, p.jitter, "neg_log_lik");

    const double days = static_cast<double>(fields.rows());
    double quad = 0.0;
    for (Eigen::Index t = 0; t < fields.rows(); ++t) {
        const Eigen::VectorXd r = fields.row(t).transpose().array() - p.mu;
        quad += r.dot(llt.solve(r));
    }
    return 0.5 * days * log_det_from_llt(llt) + 0.5 * quad +
           0.5 * days * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

CovParams fit_mle(const Grid& native, const Eigen::MatrixXd& fields) {
    if (native.size() < 2) throw ValidationError("fit_mle: need at least 2 locations");
    if (fields.rows() < 1) throw ValidationError("fit_mle: need at least one day");
    if (fields.cols() != static_cast<Eigen::Index>(native.size())) {
        throw ValidationError("fit_mle: field width != grid size");
    }

    const DistanceMatrix dist = pairwise_distances(native, native);

    // Degenerate data: constant field has no spatial signal.
    const double v0 = fields(0, 0);
    bool constant = true;
    for (Eigen::Index t = 0; t < fields.rows() && constant; ++t) {
        for (Eigen::Index j = 0; j < fields.cols(); ++j) {
            if (fields(t, j) != v0) {
                constant = false;
                break;
            }
        }
    }

    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < dist.km.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < dist.km.cols(); ++j) {
            const double d = dist.km(i, j);
            if (d > 0.0) dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
    }
    const double lo = 0.1 * dmin;
    const double hi = 10.0 * dmax;

    if (constant) {
        return CovParams{kRhoFloor, lo, v0, kRelJitter * kRhoFloor, true};
    }

    // Stage 1: log-spaced theta grid.
    std::vector<double> log_thetas(kThetaGridPoints);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < kThetaGridPoints; ++i) {
        log_thetas[i] = llo + (lhi - llo) * static_cast<double>(i) / (kThetaGridPoints - 1);
    }
    int best = 0;
    double best_nll = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kThetaGridPoints; ++i) {
        const double nll = profile_at_theta(std::exp(log_thetas[i]), dist.km, fields).nll;
        if (nll < best_nll) {
            best_nll = nll;
            best = i;
        }
    }

    // Stage 2: golden section on log(theta) in the bracketing interval.
    double a = log_thetas[std::max(best - 1, 0)];
    double b = log_thetas[std::min(best + 1, kThetaGridPoints - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = profile_at_theta(std::exp(x1), dist.km, fields).nll;
    double f2 = profile_at_theta(std::exp(x2), dist.km, fields).nll;
    while (b - a > kThetaRelTol) {  // log-scale width == relative width in theta
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = profile_at_theta(std::exp(x1), dist.km, fields).nll;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = profile_at_theta(std::exp(x2), dist.km, fields).nll;
        }
    }
    const double theta = std::exp(0.5 * (a + b));
    const ProfileResult prof = profile_at_theta(theta, dist.km, fields);
    CovParams out{prof.rho, theta, prof.mu, kRelJitter * prof.rho, prof.rho <= kRhoFloor};
    return out;
}

ConditionalLaw conditional_law(const CovParams& p, const Grid& native, const Grid& target,
                               const Eigen::VectorXd& native_values, int day_index) {
    if (native_values.size() != static_cast<Eigen::Index>(native.size())) {
        throw ValidationError("conditional_law: native_values length != native grid size");
    }
    const KrigingOperator op = make_kriging_operator(p, native, target);
    return ConditionalLaw{op.mean_for(native_values), op.cond_cov, day_index};
}

KrigingOperator make_kriging_operator(const CovParams& p, const Grid& native,
                                      const Grid& target) {
    const Eigen::MatrixXd k_ss_base =
        p.rho * (-pairwise_distances(native, native).km / p.theta_km).array().exp();
    const Eigen::MatrixXd k_ts = exp_cov(pairwise_distances(target, native), p);
    const Eigen::MatrixXd k_tt = exp_cov(pairwise_distances(target, target), p);

    const auto llt = llt_with_escalation(k_ss_base, p.jitter, "conditional_law");
    const Eigen::MatrixXd weights = llt.solve(k_ts.transpose()).transpose();  // K_ts K_ss^-1
    Eigen::MatrixXd cov = k_tt - weights * k_ts.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    return KrigingOperator{weights, std::move(cov), p.mu};
}

Eigen::VectorXd KrigingOperator::mean_for(const Eigen::VectorXd& native_values) const {
    return Eigen::VectorXd::Constant(weights.rows(), mu) +
           weights * (native_values.array() - mu).matrix();
}

PsdFactor::PsdFactor(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericError("PsdFactor: eigendecomposition failed");
    }
    const double trace = cov.trace();
    const double floor = -1e-6 * std::max(trace, 0.0);
    Eigen::VectorXd lambda = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < floor) {
            throw ValidationError("PsdFactor: covariance has a negative eigenvalue beyond tolerance");
        }
        lambda(i) = std::max(lambda(i), 0.0);
    }
    factor_ = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

Eigen::VectorXd PsdFactor::apply_to_normals(std::uint64_t key) const {
    rng::Stream stream(key);
    Eigen::VectorXd z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.normal();
    return factor_ * z;
}

Eigen::MatrixXd conditional_simulate(const ConditionalLaw& law, int n_draws, std::uint64_t seed) {
    if (n_draws < 1) throw ValidationError("conditional_simulate: n_draws must be >= 1");
    if (law.cov.rows() != law.cov.cols() || law.cov.rows() != law.mean.size()) {
        throw ValidationError("conditional_simulate: law dimensions disagree");
    }
    const PsdFactor factor(law.cov);
    Eigen::MatrixXd draws(n_draws, law.mean.size());
    for (int d = 0; d < n_draws; ++d) {
        draws.row(d) =
            (law.mean + factor.apply_to_normals(rng::derive(seed, static_cast<std::uint64_t>(d))))
                .transpose();
    }
    return draws;
}

}  // namespace regrid_uq
