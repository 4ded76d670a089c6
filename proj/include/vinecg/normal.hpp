#pragma once

namespace vinecg {

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Standard normal quantile (inverse CDF), accurate to full double
/// precision on (0, 1).
double std_normal_quantile(double p);

/// Standard bivariate normal CDF P(X <= x, Y <= y) with correlation rho,
/// following the Drezner-Wesolowsky / Genz quadrature scheme.
double bvn_cdf(double x, double y, double rho);

}  // namespace vinecg
