#include "surge/polyroots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace surge {

PolyRoots real_polynomial_roots(const std::vector<double>& coeffs) {
    PolyRoots out;
    // strip negligible leading coefficients
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return out;
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && std::abs(coeffs[static_cast<size_t>(deg)]) < 1e-14 * scale) --deg;
    if (deg < 1) return out;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    const double lead = coeffs[static_cast<size_t>(deg)];
    for (int i = 0; i < deg; ++i) companion(0, i) = -coeffs[static_cast<size_t>(deg - 1 - i)] / lead;
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        out.converged = false;
        return out;
    }
    const auto vals = solver.eigenvalues();
    for (int i = 0; i < vals.size(); ++i) {
        const double re = vals[i].real();
        const double im = vals[i].imag();
        if (std::abs(im) <= 1e-9 * std::max(1.0, std::abs(re))) out.real_roots.push_back(re);
    }
    std::sort(out.real_roots.begin(), out.real_roots.end());
    return out;
}

} // namespace surge
