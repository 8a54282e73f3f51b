#pragma once

#include <span>
#include <vector>

namespace regrid_uq::stats {

// Empirical quantile by linear interpolation between order statistics at
// 1-based position 1 + q*(n-1). Input must already be sorted ascending.
double quantile_sorted(std::span<const double> sorted, double q);

// Convenience overload: sorts a copy.
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);
double median(std::vector<double> values);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

// Two-sided p-value for a t statistic with dof degrees of freedom.
double two_sided_t_pvalue(double t, double dof);

double norm_cdf(double z);

}  // namespace regrid_uq::stats
