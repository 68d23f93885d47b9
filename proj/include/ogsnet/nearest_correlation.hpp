#pragma once

#include <vector>

namespace ogsnet {

struct NearestCorrelationResult {
    std::vector<double> matrix;  // n x n row-major correlation matrix
    int iterations = 0;
    bool converged = false;
    double max_delta = 0.0;  // max |change| from the input matrix
};

/// Nearest correlation matrix in the Frobenius norm (Higham's alternating
/// projections with Dykstra correction): alternately project onto the PSD
/// cone and the unit-diagonal affine set.
NearestCorrelationResult nearest_correlation_matrix(
    const std::vector<double>& a, int n, double tol = 1e-10,
    int max_iterations = 500);

/// Smallest eigenvalue of a symmetric matrix (row-major n x n).
double min_eigenvalue(const std::vector<double>& a, int n);

}  // namespace ogsnet
