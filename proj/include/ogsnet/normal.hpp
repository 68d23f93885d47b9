#pragma once

namespace ogsnet {

/// Standard normal CDF, Phi(x) = (1 + erf(x/sqrt(2)))/2.
double phi(double x);

/// Inverse of phi on (0, 1). Throws std::domain_error at 0 or 1 (the latent
/// mean would be infinite).
double phi_inv(double p);

/// Bivariate standard normal CDF P(X <= a, Y <= b) with correlation rho,
/// |rho| <= 1. Absolute error well below 1e-13 over the full rho range
/// (Drezner-Wesolowsky quadrature with the Genz high-correlation expansion).
double phi2(double a, double b, double rho);

}  // namespace ogsnet
