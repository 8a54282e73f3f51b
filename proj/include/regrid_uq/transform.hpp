#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

namespace regrid_uq {

// Log/linear variance-stabilizing transform: log below the knee nu, linear
// above it. Keeps back-transformed values strictly positive.
struct TransformSpec {
    double nu = 1.0;  // knee, raw field units, > 0
};

// nu = empirical q-quantile (sort-and-interpolate at position 1 + q*(n-1));
// falls back to the smallest positive value when the quantile is <= 0.
TransformSpec fit_nu(std::span<const double> values, double q = 0.20);

// log(x) for x <= nu, log(nu) + (x - nu)/nu above; continuous, increasing.
double gamma_transform(double x, const TransformSpec& spec);

// Exact inverse of gamma_transform; output is always > 0.
double gamma_inverse(double z, const TransformSpec& spec);

// Field-level entry point: clamps raw cells to max(x, 1e-6) before the
// transform (nighttime-inclusive averages can be <= 0, where the log branch
// is undefined) and reports how many cells were clamped.
Eigen::MatrixXd transform_field(const Eigen::MatrixXd& raw, const TransformSpec& spec,
                                std::size_t* clamped_count = nullptr);

Eigen::MatrixXd inverse_transform_field(const Eigen::MatrixXd& transformed,
                                        const TransformSpec& spec);

}  // namespace regrid_uq
