#pragma once

#include <cstdint>
#include <vector>

#include "ogsnet/grid.hpp"

namespace ogsnet {

/// Dichotomized-Gaussian joint availability model: a latent N-dimensional
/// Gaussian with mean mu and correlation Lambda, thresholded at zero, whose
/// binary marginals match the target cloud probabilities Omega and whose
/// covariances match the target Gamma.
struct JointAvailabilityModel {
    int n_sites = 0;
    std::vector<double> omega;         // target cloud probabilities, in (0,1)
    std::vector<double> mu;            // latent means, phi(mu_k) = omega_k
    std::vector<double> lambda;        // N x N latent correlation (post-repair)
    std::vector<double> gamma_target;  // N x N target Bernoulli covariance
    bool psd_repaired = false;
    double repair_delta = 0.0;  // max |Lambda change| from the PSD repair
    std::vector<double> factor;  // N x N B with B*B^T = Lambda, for sampling
};

struct FitOptions {
    double root_tol = 1e-12;        // |residual| accepted from the root search
    double diag_tol = 1e-6;         // |Gamma_kk - omega(1-omega)| tolerance
    bool clamp_degenerate = false;  // clamp omega into [1e-6, 1-1e-6]
};

/// Fit the latent model from target marginals and covariances. Each
/// off-diagonal Lambda is the single root of
///   Gamma_kl - [phi2(mu_k, mu_l, Lambda) - phi(mu_k) phi(mu_l)] = 0
/// on [-1, 1]; an assembled Lambda that is not positive semi-definite is
/// projected to the nearest correlation matrix and flagged.
JointAvailabilityModel fit_model(const std::vector<double>& omega,
                                 const std::vector<double>& gamma,
                                 const FitOptions& options = {});

/// Feasible Bernoulli covariance range for a pair of marginals (the Frechet
/// bounds on the joint probability).
struct FeasibleGamma {
    double lo = 0.0;
    double hi = 0.0;
};
FeasibleGamma feasible_gamma(double omega_a, double omega_b);

/// Gamma matrix from a Bernoulli correlation matrix r and marginals:
/// Gamma_kl = r_kl sqrt(om_k(1-om_k) om_l(1-om_l)).
std::vector<double> gamma_from_r(const std::vector<double>& r,
                                 const std::vector<double>& omega);

/// Monte Carlo estimate of the number-available distribution.
struct OutageDistribution {
    int n_sites = 0;
    std::int64_t n_samples = 0;
    std::vector<std::int64_t> counts;  // counts[m]: draws with exactly m available
    std::vector<double> cdf;           // p_avail(k <= M), M = 0..N
    std::vector<double> ci95;          // binomial 95% half-widths per M
};

OutageDistribution sample(const JointAvailabilityModel& model,
                          std::int64_t n_samples, std::uint64_t seed,
                          int workers = 0);

/// Empirical first and second moments of the sampled Bernoulli vector,
/// mostly for validating the fit against its own targets.
struct MomentEstimate {
    std::int64_t n_samples = 0;
    std::vector<double> omega_hat;
    std::vector<double> joint_cloudy;  // N x N, P(C_k = 1, C_l = 1)
    std::vector<double> gamma_hat;     // N x N
};

MomentEstimate sample_moments(const JointAvailabilityModel& model,
                              std::int64_t n_samples, std::uint64_t seed,
                              int workers = 0);

/// Closed form for independent sites: P(all cloudy) = prod omega_k.
double analytic_outage_uncorrelated(const std::vector<double>& omega);

/// Frequency CDF of number-available measured directly from aligned site
/// series.
OutageDistribution empirical_cdf_from_data(
    const std::vector<SiteSeries>& series);

/// 95% binomial half-width (normal approximation).
double binomial_ci95(double p_hat, std::int64_t n);

/// Wilson score interval, better behaved near 0 and 1; used when comparing
/// estimates that may have zero counts.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval wilson_interval(std::int64_t successes, std::int64_t n);

}  // namespace ogsnet
