#include "regrid_uq/arma.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "regrid_uq/csv.hpp"
#include "regrid_uq/errors.hpp"
#include "regrid_uq/rng.hpp"

namespace regrid_uq {

namespace {

// Largest root modulus of the monic recursion z^p - c_1 z^{p-1} - ... - c_p,
// via the companion matrix. Causality/invertibility <=> all moduli < 1.
double max_root_modulus(const std::vector<double>& coeffs) {
    const auto p = static_cast<Eigen::Index>(coeffs.size());
    if (p == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    double m = 0.0;
    for (Eigen::Index i = 0; i < roots.size(); ++i) m = std::max(m, std::abs(roots(i)));
    return m;
}

void require_causal(const ArmaSpec& spec, const char* what) {
    if (max_root_modulus(spec.ar) >= 1.0 - 1e-10) {
        throw ValidationError(std::string(what) + ": AR polynomial is not causal");
    }
}

// Truncation long enough that the MA(inf) tail beyond it is negligible when
// the coefficients decay like rate^j, rate < 1.
int truncation_for_rate(double rate, int n) {
    int tail = 0;
    const double a = std::min(std::fabs(rate), 0.9999);
    if (a > 1e-3) {
        tail = static_cast<int>(std::ceil(-36.0 * std::numbers::ln10 / std::log(a)));
        tail = std::min(tail, 20000);
    }
    return n + 50 + tail;
}

int family_truncation(double eta, int n) { return truncation_for_rate(eta, n); }

ArmaSpec family_spec(ArmaFamily family, double eta, int n) {
    ArmaSpec spec;
    spec.truncation = family_truncation(eta, n);
    if (family == ArmaFamily::ar1) {
        spec.ar = {eta};
    } else {
        spec.ma = {eta};
    }
    return spec;
}

}  // namespace

std::vector<double> ma_inf_coeffs(const ArmaSpec& spec) {
    if (spec.truncation < 1) throw ValidationError("ma_inf_coeffs: truncation must be >= 1");
    require_causal(spec, "ma_inf_coeffs");
    const auto p = spec.ar.size();
    const auto q = spec.ma.size();
    std::vector<double> a(static_cast<std::size_t>(spec.truncation), 0.0);
    a[0] = 1.0;
    for (std::size_t j = 1; j < a.size(); ++j) {
        double v = (j <= q) ? spec.ma[j - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(p, j); ++i) {
            v += spec.ar[i - 1] * a[j - i];
        }
        a[j] = v;
    }
    return a;
}

std::vector<double> autocov(const ArmaSpec& spec, double sigma2, int maxlag) {
    if (maxlag < 0) throw ValidationError("autocov: maxlag must be >= 0");
    if (spec.truncation < maxlag + 50) {
        throw ValidationError("autocov: truncation must be >= maxlag + 50");
    }
    const std::vector<double> a = ma_inf_coeffs(spec);
    std::vector<double> gamma(static_cast<std::size_t>(maxlag) + 1, 0.0);
    for (int h = 0; h <= maxlag; ++h) {
        double s = 0.0;
        for (std::size_t j = 0; j + static_cast<std::size_t>(h) < a.size(); ++j) {
            s += a[j] * a[j + static_cast<std::size_t>(h)];
        }
        gamma[static_cast<std::size_t>(h)] = sigma2 * s;
    }
    return gamma;
}

Eigen::MatrixXd build_omega(const ArmaSpec& spec, int n) {
    if (n < 1) throw ValidationError("build_omega: n must be >= 1");
    const std::vector<double> gamma = autocov(spec, 1.0, n - 1);
    Eigen::MatrixXd omega(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            omega(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))] / gamma[0];
        }
    }
    if (Eigen::LLT<Eigen::MatrixXd>(omega).info() != Eigen::Success) {
        throw NumericError("build_omega: correlation matrix is not positive definite");
    }
    return omega;
}

Eigen::MatrixXd build_omega(ArmaFamily family, double eta, int n) {
    return build_omega(family_spec(family, eta, n), n);
}

FamilyWhitener::FamilyWhitener(ArmaFamily family, double eta, Eigen::Index n)
    : family_(family), eta_(eta), n_(n) {
    if (n < 1) throw ValidationError("FamilyWhitener: n must be >= 1");
    if (!(std::fabs(eta) < 1.0)) {
        throw ValidationError("FamilyWhitener: |eta| must be < 1");
    }
    if (family_ == ArmaFamily::ar1) {
        log_det_omega_ = static_cast<double>(n - 1) * std::log1p(-eta * eta);
    } else {
        // Bidiagonal Cholesky of the tridiagonal MA(1) correlation matrix.
        const double c = eta / (1.0 + eta * eta);
        chol_diag_.resize(n);
        chol_sub_.resize(n > 1 ? n - 1 : 0);
        chol_diag_(0) = 1.0;
        for (Eigen::Index i = 1; i < n; ++i) {
            chol_sub_(i - 1) = c / chol_diag_(i - 1);
            const double d2 = 1.0 - chol_sub_(i - 1) * chol_sub_(i - 1);
            if (!(d2 > 0.0)) throw NumericError("FamilyWhitener: MA(1) correlation not PD");
            chol_diag_(i) = std::sqrt(d2);
        }
        log_det_omega_ = 2.0 * chol_diag_.array().log().sum();
    }
}

Eigen::VectorXd FamilyWhitener::apply(const Eigen::VectorXd& v) const {
    if (v.size() != n_) throw ValidationError("FamilyWhitener: length mismatch");
    Eigen::VectorXd out(n_);
    if (family_ == ArmaFamily::ar1) {
        const double s = 1.0 / std::sqrt(1.0 - eta_ * eta_);
        out(0) = v(0);
        for (Eigen::Index t = 1; t < n_; ++t) out(t) = (v(t) - eta_ * v(t - 1)) * s;
    } else {
        out(0) = v(0) / chol_diag_(0);
        for (Eigen::Index t = 1; t < n_; ++t) {
            out(t) = (v(t) - chol_sub_(t - 1) * out(t - 1)) / chol_diag_(t);
        }
    }
    return out;
}

Eigen::MatrixXd FamilyWhitener::apply(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = apply(Eigen::VectorXd(m.col(c)));
    return out;
}

RegressionDesign FamilyWhitener::apply(const RegressionDesign& d) const {
    RegressionDesign out;
    out.y = apply(d.y);
    out.X = apply(d.X);
    out.S = d.S.cols() > 0 ? apply(d.S) : d.S;
    return out;
}

double eta_log_marginal(double eta, const RegressionDesign& d, ArmaFamily family) {
    const Eigen::Index n = d.n();
    const Eigen::Index k = d.k();
    const FamilyWhitener whitener(family, eta, n);
    const Eigen::MatrixXd xw = whitener.apply(d.full_design());
    const Eigen::VectorXd yw = whitener.apply(d.y);

    const Eigen::MatrixXd gram = xw.transpose() * xw;  // = X^T Omega^-1 X
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw NumericError("eta_log_marginal: X^T Omega^-1 X is singular");
    }
    const Eigen::VectorXd coef = llt.solve(xw.transpose() * yw);
    const double ss = (yw - xw * coef).squaredNorm();
    if (!(ss > 0.0)) throw NumericError("eta_log_marginal: zero residual sum of squares");

    const double log_det_gram = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double half_np = 0.5 * static_cast<double>(n - k) + 1.0;
    return -half_np * std::log(ss) + 0.5 * log_det_gram - 0.5 * whitener.log_det_omega();
}

EtaPosterior eta_posterior(const RegressionDesign& d, ArmaFamily family, int grid_points) {
    if (grid_points < 1) throw ValidationError("eta_posterior: need at least one grid point");
    EtaPosterior post;
    post.grid.resize(static_cast<std::size_t>(grid_points));
    post.log_density.resize(static_cast<std::size_t>(grid_points));
    const double step = 1.98 / static_cast<double>(grid_points + 1);
    for (int i = 0; i < grid_points; ++i) {
        post.grid[static_cast<std::size_t>(i)] = -0.99 + step * static_cast<double>(i + 1);
        post.log_density[static_cast<std::size_t>(i)] =
            eta_log_marginal(post.grid[static_cast<std::size_t>(i)], d, family);
    }
    const double mx = *std::max_element(post.log_density.begin(), post.log_density.end());
    post.weights.resize(post.grid.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < post.grid.size(); ++i) {
        post.weights[i] = std::exp(post.log_density[i] - mx);
        sum += post.weights[i];
    }
    for (double& w : post.weights) w /= sum;
    return post;
}

void write_eta_posterior(const std::string& path, const EtaPosterior& post) {
    csv::Table t;
    t.header = {"eta", "log_density", "weight"};
    for (std::size_t i = 0; i < post.grid.size(); ++i) {
        t.rows.push_back({csv::format_double(post.grid[i]), csv::format_double(post.log_density[i]),
                          csv::format_double(post.weights[i])});
    }
    csv::write_table(path, t);
}

double sample_eta(const EtaPosterior& post, std::uint64_t seed) {
    if (post.grid.empty() || post.grid.size() != post.weights.size()) {
        throw ValidationError("sample_eta: malformed posterior");
    }
    rng::Stream stream(seed);
    const double u = stream.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < post.weights.size(); ++i) {
        cum += post.weights[i];
        if (u <= cum) return post.grid[i];
    }
    return post.grid.back();
}

RegressionDesign whiten(const RegressionDesign& d, const Eigen::MatrixXd& omega) {
    if (omega.rows() != omega.cols() || omega.rows() != d.n()) {
        throw ValidationError("whiten: omega size != design rows");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(omega);
    if (eig.info() != Eigen::Success) throw NumericError("whiten: eigendecomposition failed");
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() <= 0.0) {
        throw NumericError("whiten: omega is not positive definite");
    }
    const Eigen::MatrixXd root_inv =
        eig.eigenvectors() * lambda.cwiseInverse().cwiseSqrt().asDiagonal() *
        eig.eigenvectors().transpose();
    RegressionDesign out;
    out.y = root_inv * d.y;
    out.X = root_inv * d.X;
    out.S = d.S.cols() > 0 ? Eigen::MatrixXd(root_inv * d.S) : d.S;
    return out;
}

namespace {

// Profile Gaussian likelihood of a residual series under ARMA(p,q) errors,
// with sigma2 profiled out.
double arma_profile_nll(const Eigen::VectorXd& r, const std::vector<double>& ar,
                        const std::vector<double>& ma) {
    constexpr double kPenalty = 1e12;
    const double ar_rate = max_root_modulus(ar);
    if (ar_rate >= 0.999 || max_root_modulus(ma) >= 0.999) return kPenalty;
    const int n = static_cast<int>(r.size());
    // MA(inf) coefficients decay at the AR spectral radius once past lag q.
    ArmaSpec spec{ar, ma, truncation_for_rate(ar_rate, n + static_cast<int>(ma.size()))};
    const Eigen::MatrixXd omega = build_omega(spec, n);
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success) return kPenalty;
    const double quad = r.dot(llt.solve(r));
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double sigma2 = quad / n;
    if (!(sigma2 > 0.0)) return kPenalty;
    return 0.5 * (n * std::log(sigma2) + log_det + n * (1.0 + std::log(2.0 * std::numbers::pi)));
}

// Nelder-Mead on a small box; adequate for the <= 4 ARMA coefficients here.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, double scale, int max_iter) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += scale;
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(simplex[i]);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto idx : order) {
            s2.push_back(simplex[idx]);
            f2.push_back(fv[idx]);
        }
        simplex = s2;
        fv = f2;
        if (std::fabs(fv[dim] - fv[0]) < 1e-8 * (1.0 + std::fabs(fv[0]))) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j) p[j] = centroid[j] + t * (simplex[dim][j] - centroid[j]);
            return p;
        };
        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < fv[0]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[dim] = expanded;
                fv[dim] = fe;
            } else {
                simplex[dim] = reflected;
                fv[dim] = fr;
            }
        } else if (fr < fv[dim - 1]) {
            simplex[dim] = reflected;
            fv[dim] = fr;
        } else {
            const auto contracted = blend(0.5);
            const double fc = f(contracted);
            if (fc < fv[dim]) {
                simplex[dim] = contracted;
                fv[dim] = fc;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i) {
        if (fv[i] < fv[best]) best = i;
    }
    return simplex[best];
}

}  // namespace

std::vector<ArmaOrderEntry> arma_order_report(const Eigen::VectorXd& residuals) {
    if (residuals.size() < 20) throw ValidationError("arma_order_report: need at least 20 residuals");
    const double n = static_cast<double>(residuals.size());
    std::vector<ArmaOrderEntry> report;
    for (int p = 0; p <= 2; ++p) {
        for (int q = 0; q <= 2; ++q) {
            ArmaOrderEntry entry;
            entry.p = p;
            entry.q = q;
            double nll = 0.0;
            if (p + q == 0) {
                nll = arma_profile_nll(residuals, {}, {});
            } else {
                auto objective = [&](const std::vector<double>& params) {
                    std::vector<double> ar(params.begin(), params.begin() + p);
                    std::vector<double> ma(params.begin() + p, params.end());
                    return arma_profile_nll(residuals, ar, ma);
                };
                const auto best =
                    nelder_mead(objective, std::vector<double>(static_cast<std::size_t>(p + q), 0.0),
                                0.2, 200);
                entry.ar.assign(best.begin(), best.begin() + p);
                entry.ma.assign(best.begin() + p, best.end());
                nll = objective(best);
            }
            const double n_params = static_cast<double>(p + q + 1);  // + sigma2
            entry.aic = 2.0 * nll + 2.0 * n_params;
            entry.bic = 2.0 * nll + std::log(n) * n_params;
            report.push_back(std::move(entry));
        }
    }
    return report;
}

}  // namespace regrid_uq
