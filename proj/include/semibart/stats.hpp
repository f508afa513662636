#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace semibart {

// Standard normal distribution function Phi(x), absolute error below 1e-15.
double normal_cdf(double x);

// Upper tail 1 - Phi(x), accurate for large x where the difference underflows.
double normal_cdf_upper(double x);

// Inverse of Phi on (0,1); AS241 rational approximation, ~1e-15 relative error.
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

double chi2_cdf(double x, double df);

// Solves chi2_cdf(x, df) = p for x, p in (0,1).
double chi2_quantile(double p, double df);

// Linear interpolation of order statistics (the classic "type 7" rule):
// with n sorted values, quantile p sits at index (n-1)*p.
double quantile_type7(std::vector<double> values, double p);

double sample_mean(const Eigen::VectorXd& v);

// Unbiased (n-1 denominator) standard deviation; requires v.size() >= 2.
double sample_sd(const Eigen::VectorXd& v);

// Rounds to `digits` decimals with halves away from zero, guarding against
// representation error: 0.955 -> 0.96 even though 0.955 stores as 0.95499...
double round_half_up(double x, int digits);

// round_half_up then fixed-point text; never prints "-0.00".
std::string format_fixed(double x, int digits);

// Shortest decimal text that parses back to exactly x.
std::string format_full(double x);

}  // namespace semibart
