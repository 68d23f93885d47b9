#include "ogsnet/dgmodel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ogsnet/nearest_correlation.hpp"
#include "ogsnet/normal.hpp"
#include "ogsnet/parallel.hpp"
#include "ogsnet/philox.hpp"

namespace ogsnet {

namespace {

constexpr double kPsdTol = 1e-12;

// Root of gamma - [phi2(mu_a, mu_b, x) - phi(mu_a) phi(mu_b)] = 0 on [-1, 1].
// phi2 is monotone non-decreasing in the correlation, so plain bisection is
// bulletproof; the bracket closes to machine precision in ~60 steps.
double solve_lambda(double mu_a, double mu_b, double gamma, double root_tol) {
    if (gamma == 0.0) return 0.0;  // phi2(a,b,0) = phi(a) phi(b) exactly

    const double target = gamma + phi(mu_a) * phi(mu_b);
    auto f = [&](double lam) { return phi2(mu_a, mu_b, lam) - target; };

    double lo = -1.0 + 1e-12, hi = 1.0 - 1e-12;
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw std::runtime_error(
            "fit_model: root not bracketed (infeasible Gamma target)");
    for (int it = 0; it < 200 && hi - lo > 4e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    const double lam = (std::fabs(flo) <= std::fabs(fhi)) ? lo : hi;
    const double residual = std::fabs(f(lam));
    if (residual > root_tol)
        throw std::runtime_error("fit_model: root search residual " +
                                 std::to_string(residual) + " exceeds tolerance");
    return lam;
}

std::vector<double> sampling_factor(const std::vector<double>& lambda, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = lambda[std::size_t(i) * n + j];
    // Symmetric square root with eigenvalues clamped at zero: valid for the
    // semi-definite matrices the PSD repair can produce.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd sqrt_ev =
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd b = es.eigenvectors() * sqrt_ev.asDiagonal();
    std::vector<double> out(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = b(i, j);
    return out;
}

// Shared Monte Carlo core: draws are keyed by (seed, draw index), so every
// chunk is reproducible in isolation and tallies merge exactly regardless of
// worker count. Visits fn(draw_cloudy_bitmask) for every draw in the chunk.
template <class PerDraw>
void run_chunk(const JointAvailabilityModel& model, std::uint64_t seed,
               std::int64_t begin, std::int64_t end, PerDraw&& per_draw) {
    const int n = model.n_sites;
    const int n_pairs = (n + 1) / 2;
    double z[64];
    double x[64];
    for (std::int64_t d = begin; d < end; ++d) {
        for (int p = 0; p < n_pairs; ++p) {
            double z0, z1;
            normal_pair(seed, RandomDomain::dg_sampler, std::uint64_t(d),
                        std::uint32_t(p), z0, z1);
            z[2 * p] = z0;
            if (2 * p + 1 < n) z[2 * p + 1] = z1;
        }
        const double* b = model.factor.data();
        for (int k = 0; k < n; ++k) {
            double acc = model.mu[std::size_t(k)];
            const double* row = b + std::size_t(k) * n;
            for (int j = 0; j < n; ++j) acc += row[j] * z[j];
            x[k] = acc;
        }
        std::uint64_t cloudy = 0;
        for (int k = 0; k < n; ++k)
            if (x[k] > 0.0) cloudy |= (std::uint64_t(1) << k);
        per_draw(cloudy);
    }
}

constexpr std::int64_t kChunkDraws = 1 << 16;

}  // namespace

FeasibleGamma feasible_gamma(double omega_a, double omega_b) {
    const double joint_lo = std::max(0.0, omega_a + omega_b - 1.0);
    const double joint_hi = std::min(omega_a, omega_b);
    return {joint_lo - omega_a * omega_b, joint_hi - omega_a * omega_b};
}

std::vector<double> gamma_from_r(const std::vector<double>& r,
                                 const std::vector<double>& omega) {
    const std::size_t n = omega.size();
    if (r.size() != n * n)
        throw std::invalid_argument("gamma_from_r: matrix size mismatch");
    std::vector<double> gamma(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const double sk = omega[k] * (1.0 - omega[k]);
            const double sl = omega[l] * (1.0 - omega[l]);
            gamma[k * n + l] = r[k * n + l] * std::sqrt(sk * sl);
        }
    return gamma;
}

JointAvailabilityModel fit_model(const std::vector<double>& omega_in,
                                 const std::vector<double>& gamma,
                                 const FitOptions& options) {
    const int n = int(omega_in.size());
    if (n < 1) throw std::invalid_argument("fit_model: empty omega");
    if (gamma.size() != std::size_t(n) * n)
        throw std::invalid_argument("fit_model: gamma size mismatch");

    std::vector<double> omega = omega_in;
    for (double& om : omega) {
        if (options.clamp_degenerate)
            om = std::clamp(om, 1e-6, 1.0 - 1e-6);
        else if (!(om > 0.0 && om < 1.0))
            throw std::invalid_argument("fit_model: degenerate marginal (omega at 0 or 1)");
    }

    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            const double a = gamma[std::size_t(k) * n + l];
            const double b = gamma[std::size_t(l) * n + k];
            if (std::fabs(a - b) > 1e-12)
                throw std::invalid_argument("fit_model: gamma is not symmetric");
        }
    for (int k = 0; k < n; ++k) {
        const double expect = omega[std::size_t(k)] * (1.0 - omega[std::size_t(k)]);
        if (std::fabs(gamma[std::size_t(k) * n + k] - expect) > options.diag_tol)
            throw std::invalid_argument(
                "fit_model: gamma diagonal inconsistent with omega(1-omega) at site " +
                std::to_string(k));
    }
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            const FeasibleGamma fe =
                feasible_gamma(omega[std::size_t(k)], omega[std::size_t(l)]);
            const double g = gamma[std::size_t(k) * n + l];
            if (g < fe.lo - 1e-12 || g > fe.hi + 1e-12)
                throw std::invalid_argument(
                    "fit_model: gamma target infeasible for pair (" +
                    std::to_string(k) + "," + std::to_string(l) + "): " +
                    std::to_string(g) + " outside [" + std::to_string(fe.lo) +
                    ", " + std::to_string(fe.hi) + "]");
        }

    JointAvailabilityModel model;
    model.n_sites = n;
    model.omega = omega;
    model.gamma_target = gamma;
    model.mu.resize(std::size_t(n));
    for (int k = 0; k < n; ++k) model.mu[std::size_t(k)] = phi_inv(omega[std::size_t(k)]);

    model.lambda.assign(std::size_t(n) * n, 0.0);
    for (int k = 0; k < n; ++k) model.lambda[std::size_t(k) * n + k] = 1.0;
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            const double lam =
                solve_lambda(model.mu[std::size_t(k)], model.mu[std::size_t(l)],
                             gamma[std::size_t(k) * n + l], options.root_tol);
            model.lambda[std::size_t(k) * n + l] = lam;
            model.lambda[std::size_t(l) * n + k] = lam;
        }

    if (n > 1 && min_eigenvalue(model.lambda, n) < -kPsdTol) {
        const NearestCorrelationResult repair =
            nearest_correlation_matrix(model.lambda, n);
        if (!repair.converged)
            throw std::runtime_error("fit_model: PSD repair did not converge");
        model.psd_repaired = true;
        model.repair_delta = repair.max_delta;
        model.lambda = repair.matrix;
    }

    model.factor = sampling_factor(model.lambda, n);
    return model;
}

OutageDistribution sample(const JointAvailabilityModel& model,
                          std::int64_t n_samples, std::uint64_t seed,
                          int workers) {
    if (model.n_sites < 1 || model.n_sites > 64)
        throw std::invalid_argument("sample: n_sites must be in [1, 64]");
    if (n_samples < 1) throw std::invalid_argument("sample: n_samples must be >= 1");

    const int n = model.n_sites;
    const std::int64_t n_chunks = (n_samples + kChunkDraws - 1) / kChunkDraws;
    std::vector<std::vector<std::int64_t>> partial(
        std::size_t(n_chunks), std::vector<std::int64_t>(std::size_t(n) + 1, 0));

    parallel_chunks(n_chunks, resolve_workers(workers), [&](std::int64_t c) {
        auto& counts = partial[std::size_t(c)];
        const std::int64_t begin = c * kChunkDraws;
        const std::int64_t end = std::min(n_samples, begin + kChunkDraws);
        run_chunk(model, seed, begin, end, [&](std::uint64_t cloudy) {
            const int available = n - std::popcount(cloudy);
            ++counts[std::size_t(available)];
        });
    });

    OutageDistribution out;
    out.n_sites = n;
    out.n_samples = n_samples;
    out.counts.assign(std::size_t(n) + 1, 0);
    for (const auto& counts : partial)
        for (int m = 0; m <= n; ++m) out.counts[std::size_t(m)] += counts[std::size_t(m)];

    out.cdf.resize(std::size_t(n) + 1);
    out.ci95.resize(std::size_t(n) + 1);
    std::int64_t cum = 0;
    for (int m = 0; m <= n; ++m) {
        cum += out.counts[std::size_t(m)];
        const double p = double(cum) / double(n_samples);
        out.cdf[std::size_t(m)] = p;
        out.ci95[std::size_t(m)] = binomial_ci95(p, n_samples);
    }
    out.cdf[std::size_t(n)] = 1.0;
    return out;
}

MomentEstimate sample_moments(const JointAvailabilityModel& model,
                              std::int64_t n_samples, std::uint64_t seed,
                              int workers) {
    if (model.n_sites < 1 || model.n_sites > 64)
        throw std::invalid_argument("sample_moments: n_sites must be in [1, 64]");
    const int n = model.n_sites;
    const std::int64_t n_chunks = (n_samples + kChunkDraws - 1) / kChunkDraws;
    const std::size_t nn = std::size_t(n) * n;
    std::vector<std::vector<std::int64_t>> partial(
        std::size_t(n_chunks), std::vector<std::int64_t>(nn, 0));

    parallel_chunks(n_chunks, resolve_workers(workers), [&](std::int64_t c) {
        auto& joint = partial[std::size_t(c)];
        const std::int64_t begin = c * kChunkDraws;
        const std::int64_t end = std::min(n_samples, begin + kChunkDraws);
        run_chunk(model, seed, begin, end, [&](std::uint64_t cloudy) {
            for (int k = 0; k < n; ++k) {
                if (!(cloudy >> k & 1)) continue;
                for (int l = k; l < n; ++l)
                    if (cloudy >> l & 1) ++joint[std::size_t(k) * n + l];
            }
        });
    });

    std::vector<std::int64_t> joint(nn, 0);
    for (const auto& part : partial)
        for (std::size_t i = 0; i < nn; ++i) joint[i] += part[i];

    MomentEstimate out;
    out.n_samples = n_samples;
    out.omega_hat.resize(std::size_t(n));
    out.joint_cloudy.assign(nn, 0.0);
    out.gamma_hat.assign(nn, 0.0);
    for (int k = 0; k < n; ++k)
        out.omega_hat[std::size_t(k)] =
            double(joint[std::size_t(k) * n + k]) / double(n_samples);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const double p = double(joint[std::size_t(k) * n + l]) / double(n_samples);
            out.joint_cloudy[std::size_t(k) * n + l] = p;
            out.joint_cloudy[std::size_t(l) * n + k] = p;
            const double g =
                p - out.omega_hat[std::size_t(k)] * out.omega_hat[std::size_t(l)];
            out.gamma_hat[std::size_t(k) * n + l] = g;
            out.gamma_hat[std::size_t(l) * n + k] = g;
        }
    return out;
}

double analytic_outage_uncorrelated(const std::vector<double>& omega) {
    double p = 1.0;
    for (double om : omega) {
        if (om < 0.0 || om > 1.0)
            throw std::invalid_argument("analytic_outage_uncorrelated: omega outside [0,1]");
        p *= om;
    }
    return p;
}

OutageDistribution empirical_cdf_from_data(
    const std::vector<SiteSeries>& series) {
    if (series.empty())
        throw std::invalid_argument("empirical_cdf_from_data: no series");
    for (std::size_t k = 1; k < series.size(); ++k)
        if (series[k].timestamps != series[0].timestamps)
            throw std::invalid_argument("empirical_cdf_from_data: series misaligned");

    const int n = int(series.size());
    const std::size_t frames = series[0].size();
    if (frames == 0)
        throw std::invalid_argument("empirical_cdf_from_data: empty series");

    OutageDistribution out;
    out.n_sites = n;
    out.n_samples = std::int64_t(frames);
    out.counts.assign(std::size_t(n) + 1, 0);
    for (std::size_t t = 0; t < frames; ++t) {
        int available = 0;
        for (int k = 0; k < n; ++k)
            if (series[std::size_t(k)].binary[t] == 0) ++available;
        ++out.counts[std::size_t(available)];
    }
    out.cdf.resize(std::size_t(n) + 1);
    out.ci95.resize(std::size_t(n) + 1);
    std::int64_t cum = 0;
    for (int m = 0; m <= n; ++m) {
        cum += out.counts[std::size_t(m)];
        const double p = double(cum) / double(frames);
        out.cdf[std::size_t(m)] = p;
        out.ci95[std::size_t(m)] = binomial_ci95(p, std::int64_t(frames));
    }
    out.cdf[std::size_t(n)] = 1.0;
    return out;
}

double binomial_ci95(double p_hat, std::int64_t n) {
    return 1.959963984540054 * std::sqrt(p_hat * (1.0 - p_hat) / double(n));
}

Interval wilson_interval(std::int64_t successes, std::int64_t n) {
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double p = double(successes) / double(n);
    const double denom = 1.0 + z2 / double(n);
    const double center = (p + z2 / (2.0 * double(n))) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) /
        denom;
    Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) out.lo = 0.0;
    if (successes == n) out.hi = 1.0;
    return out;
}

}  // namespace ogsnet
