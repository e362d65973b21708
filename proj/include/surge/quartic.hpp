#pragma once

#include "surge/series.hpp"

#include <vector>

namespace surge {

// Z(g) = integral exp(-(x^2 + x^4)/g) dx over the real line, by adaptive
// quadrature on [0, cutoff] doubled by symmetry. Absolute error <= tolerance.
double exact_quartic_Z(double g, double tolerance);

// Coefficients of Z(g)/sqrt(pi g) ~ sum a_k g^k from the Gaussian moment
// expansion: a_k = (-1)^k (4k-1)!! / (4^k k!).
std::vector<double> quartic_asymptotic_coeffs(int k_max);

struct EulerFixture {
    PowerSeries series;                 // a_n = n!, 12 terms
    double pole = 1.0;                  // Borel-plane singularity
    double stokes_magnitude(double g) const; // |discontinuity| = 2 pi exp(-1/g)
};

EulerFixture euler_series_fixture();

struct OracleRow {
    double g = 0.0;
    double exact = 0.0;
    double truncated = 0.0;   // optimally truncated series, sqrt(pi g) prefactor included
    int truncation_order = 0; // terms used
    double borel_pade = 0.0;
    double rel_err_truncated = 0.0;
    double rel_err_borel_pade = 0.0;
};

struct CoefficientRow {
    int k = 0;
    double oracle = 0.0;
    double fitted = 0.0; // NaN when no fit was supplied
};

struct OracleReport {
    std::vector<OracleRow> rows;               // sorted by g
    std::vector<CoefficientRow> coefficients;
    double zeta1 = 0.0;        // dominant Borel singularity distance used for truncation
    double paper_zeta_a = 0.0; // the two printed singularity formulas, kept for comparison
    double paper_zeta_b = 0.0;
};

// For each g: exact quadrature value, optimally truncated series with
// N_opt = round(zeta1/g) (ties round down, capped at series_order), and the
// Borel-Pade resummation sqrt(pi g) * laplace(pade[m/n]). zeta1 comes from the
// approximant's own dominant denominator root (smallest magnitude), falling
// back to the ratio-test radius.
OracleReport verify_resummation(const std::vector<double>& g_grid, int series_order, int pade_m,
                                int pade_n, const std::vector<double>& fitted_coeffs = {});

} // namespace surge
