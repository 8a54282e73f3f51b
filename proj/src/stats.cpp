#include "regrid_uq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regrid_uq/errors.hpp"

namespace regrid_uq::stats {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile: empty input");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile: q outside [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = 1.0 + q * static_cast<double>(n - 1);  // 1-based
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo >= n) return sorted[n - 1];
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

double mean(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean: empty input");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("sample_variance: need at least 2 values");
    const double m = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return s / static_cast<double>(values.size() - 1);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

// Lentz continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw ValidationError("student_t_cdf: dof must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("student_t_quantile: p outside (0,1)");
    if (!(dof > 0.0)) throw ValidationError("student_t_quantile: dof must be positive");
    if (p == 0.5) return 0.0;
    // Expanding bracket, then bisection. CDF is monotone; 200 halvings of an
    // adequate bracket reach full double precision.
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, dof) > p) lo *= 2.0;
    while (student_t_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14 * (1.0 + std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

double two_sided_t_pvalue(double t, double dof) {
    const double tail = 1.0 - student_t_cdf(std::fabs(t), dof);
    return std::min(1.0, 2.0 * tail);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace regrid_uq::stats
