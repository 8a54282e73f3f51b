#include "regrid_uq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "regrid_uq/errors.hpp"
#include "regrid_uq/log.hpp"
#include "regrid_uq/stats.hpp"

namespace regrid_uq {

namespace {
constexpr double kClampFloor = 1e-6;  // W m^-2
}

TransformSpec fit_nu(std::span<const double> values, double q) {
    if (values.empty()) throw ValidationError("fit_nu: empty input");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("fit_nu: q outside (0,1)");

    double smallest_positive = std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (v > 0.0) smallest_positive = std::min(smallest_positive, v);
    }
    if (!std::isfinite(smallest_positive)) {
        throw ValidationError("fit_nu: no positive values");
    }

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double quant = stats::quantile_sorted(sorted, q);
    return TransformSpec{quant > 0.0 ? quant : smallest_positive};
}

double gamma_transform(double x, const TransformSpec& spec) {
    if (x <= spec.nu) {
        if (!(x > 0.0)) {
            throw ValidationError("gamma_transform: nonpositive value on log branch");
        }
        return std::log(x);
    }
    return std::log(spec.nu) + (x - spec.nu) / spec.nu;
}

double gamma_inverse(double z, const TransformSpec& spec) {
    const double log_nu = std::log(spec.nu);
    if (z <= log_nu) return std::exp(z);
    return spec.nu * (1.0 + (z - log_nu));
}

Eigen::MatrixXd transform_field(const Eigen::MatrixXd& raw, const TransformSpec& spec,
                                std::size_t* clamped_count) {
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    std::size_t clamped = 0;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        for (Eigen::Index j = 0; j < raw.cols(); ++j) {
            double v = raw(i, j);
            if (v < kClampFloor) {
                v = kClampFloor;
                ++clamped;
            }
            out(i, j) = gamma_transform(v, spec);
        }
    }
    if (clamped > 0) {
        log::info("transform_field: clamped ", clamped, " cells to ", kClampFloor);
    }
    if (clamped_count != nullptr) *clamped_count = clamped;
    return out;
}

Eigen::MatrixXd inverse_transform_field(const Eigen::MatrixXd& transformed,
                                        const TransformSpec& spec) {
    Eigen::MatrixXd out(transformed.rows(), transformed.cols());
    for (Eigen::Index i = 0; i < transformed.rows(); ++i) {
        for (Eigen::Index j = 0; j < transformed.cols(); ++j) {
            out(i, j) = gamma_inverse(transformed(i, j), spec);
        }
    }
    return out;
}

}  // namespace regrid_uq
