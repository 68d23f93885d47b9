#include "ogsnet/nearest_correlation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ogsnet {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<double>& a, int n) {
    if (a.size() != std::size_t(n) * n)
        throw std::invalid_argument("matrix size does not match n");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a[std::size_t(i) * n + j];
    return m;
}

Eigen::MatrixXd psd_projection(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

NearestCorrelationResult nearest_correlation_matrix(
    const std::vector<double>& a, int n, double tol, int max_iterations) {
    Eigen::MatrixXd in = to_eigen(a, n);
    in = 0.5 * (in + in.transpose().eval());

    Eigen::MatrixXd y = in;
    Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(n, n);

    NearestCorrelationResult result;
    for (int it = 1; it <= max_iterations; ++it) {
        const Eigen::MatrixXd r = y - ds;
        const Eigen::MatrixXd x = psd_projection(r);
        ds = x - r;
        Eigen::MatrixXd y_next = x;
        y_next.diagonal().setOnes();

        const double change = (y_next - y).cwiseAbs().maxCoeff();
        y = y_next;
        result.iterations = it;
        if (change < tol) {
            result.converged = true;
            break;
        }
    }

    y = 0.5 * (y + y.transpose().eval());
    y.diagonal().setOnes();
    y = y.cwiseMax(-1.0).cwiseMin(1.0);

    result.matrix.resize(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            result.matrix[std::size_t(i) * n + j] = y(i, j);
    result.max_delta = (y - in).cwiseAbs().maxCoeff();
    return result;
}

double min_eigenvalue(const std::vector<double>& a, int n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a, n));
    return es.eigenvalues().minCoeff();
}

}  // namespace ogsnet
