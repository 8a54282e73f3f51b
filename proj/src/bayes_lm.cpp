#include "regrid_uq/bayes_lm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regrid_uq/errors.hpp"
#include "regrid_uq/gp.hpp"
#include "regrid_uq/rng.hpp"
#include "regrid_uq/stats.hpp"

namespace regrid_uq {

Eigen::MatrixXd RegressionDesign::full_design() const {
    Eigen::MatrixXd d(y.size(), X.cols() + S.cols());
    d.leftCols(X.cols()) = X;
    if (S.cols() > 0) d.rightCols(S.cols()) = S;
    return d;
}

Eigen::VectorXd OlsFit::coefficients() const {
    Eigen::VectorXd c(beta.size() + gamma.size());
    c.head(beta.size()) = beta;
    if (gamma.size() > 0) c.tail(gamma.size()) = gamma;
    return c;
}

OlsFit ols_fit(const RegressionDesign& d) {
    const Eigen::Index n = d.n();
    const Eigen::Index k = d.k();
    if (d.X.rows() != n || (d.S.cols() > 0 && d.S.rows() != n)) {
        throw ValidationError("ols_fit: row counts of y, X, S disagree");
    }
    if (k >= n) throw ValidationError("ols_fit: need more rows than columns (k < n)");

    const Eigen::MatrixXd design = d.full_design();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        // Columns permuted past the numerical rank are the dependent ones.
        const auto perm = qr.colsPermutation().indices();
        std::string cols;
        for (Eigen::Index i = qr.rank(); i < k; ++i) {
            if (!cols.empty()) cols += ", ";
            cols += std::to_string(perm(i));
        }
        throw NumericError("ols_fit: singular design, dependent column(s): " + cols);
    }

    const Eigen::VectorXd coef = qr.solve(d.y);
    const Eigen::VectorXd fitted = design * coef;
    const Eigen::VectorXd residuals = d.y - fitted;
    const double rss = residuals.squaredNorm();
    const double s2 = rss / static_cast<double>(n - k);

    const Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw NumericError("ols_fit: Gram matrix factorization failed");
    }
    const Eigen::MatrixXd gram_inverse = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

    OlsFit fit;
    fit.beta = coef.head(d.X.cols());
    fit.gamma = coef.tail(d.S.cols());
    fit.s2 = s2;
    fit.residuals = residuals;
    fit.gram_inverse = gram_inverse;
    fit.n = n;
    fit.k = k;
    return fit;
}

double sample_sigma2(int n, int k, double s2, std::uint64_t seed) {
    if (n <= k) throw ValidationError("sample_sigma2: requires n > k");
    if (s2 < 0.0) throw ValidationError("sample_sigma2: s2 must be >= 0");
    if (s2 == 0.0) return 0.0;
    rng::Stream stream(seed);
    const double dof = static_cast<double>(n - k);
    const double g = stream.chi_square(dof);
    return dof * s2 / g;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_coefficients(
    const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& gamma_hat,
    const Eigen::MatrixXd& gram_inverse, double sigma2, std::uint64_t seed) {
    const Eigen::Index k = beta_hat.size() + gamma_hat.size();
    if (gram_inverse.rows() != k || gram_inverse.cols() != k) {
        throw ValidationError("sample_coefficients: gram_inverse size != coefficient count");
    }
    if (sigma2 < 0.0) throw ValidationError("sample_coefficients: sigma2 must be >= 0");
    if (!gram_inverse.isApprox(gram_inverse.transpose(), 1e-8)) {
        throw ValidationError("sample_coefficients: gram_inverse not symmetric");
    }

    Eigen::VectorXd mean(k);
    mean.head(beta_hat.size()) = beta_hat;
    mean.tail(gamma_hat.size()) = gamma_hat;

    Eigen::VectorXd draw = mean;
    if (sigma2 > 0.0) {
        const PsdFactor factor(sigma2 * gram_inverse);  // rejects non-PSD input
        draw += factor.apply_to_normals(seed);
    }
    return {draw.head(beta_hat.size()), draw.tail(gamma_hat.size())};
}

Eigen::VectorXd predictive_samples(std::span<const PosteriorDraw> draws,
                                   const Eigen::VectorXd& x_new, std::uint64_t seed) {
    if (draws.empty()) throw ValidationError("predictive_samples: no draws");
    Eigen::VectorXd out(static_cast<Eigen::Index>(draws.size()));
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto& d = draws[i];
        if (d.beta.size() + d.gamma.size() != x_new.size()) {
            throw ValidationError("predictive_samples: x_new length != coefficient count");
        }
        double fit = d.beta.dot(x_new.head(d.beta.size()));
        if (d.gamma.size() > 0) fit += d.gamma.dot(x_new.tail(d.gamma.size()));
        rng::Stream stream(rng::derive(seed, static_cast<std::uint64_t>(i)));
        out(static_cast<Eigen::Index>(i)) = fit + std::sqrt(d.sigma2) * stream.normal();
    }
    return out;
}

std::pair<double, double> predictive_interval(std::span<const PosteriorDraw> draws,
                                              const Eigen::VectorXd& x_new, double level,
                                              std::uint64_t seed) {
    if (draws.size() < 100) throw ValidationError("predictive_interval: need at least 100 draws");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("predictive_interval: level outside (0,1)");
    const Eigen::VectorXd samples = predictive_samples(draws, x_new, seed);
    std::vector<double> sorted(samples.data(), samples.data() + samples.size());
    std::sort(sorted.begin(), sorted.end());
    return {stats::quantile_sorted(sorted, 0.5 * (1.0 - level)),
            stats::quantile_sorted(sorted, 0.5 * (1.0 + level))};
}

}  // namespace regrid_uq
