#include "surge/quartic.hpp"

#include "surge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surge {

double exact_quartic_Z(double g, double tolerance) {
    if (!(g > 0.0)) throw invalid_input_error("exact_quartic_Z: g must be positive");
    if (!(tolerance > 0.0)) throw invalid_input_error("exact_quartic_Z: tolerance must be positive");

    // cutoff where the integrand falls below tolerance * peak (peak = 1 at x=0)
    const double t_cut = g * std::log(1.0 / std::min(tolerance, 1e-2));
    const double x_cut = std::sqrt(0.5 * (std::sqrt(1.0 + 4.0 * t_cut) - 1.0)) + 1.0;
    const auto integrand = [g](double x) { return std::exp(-(x * x + x * x * x * x) / g); };
    return 2.0 * integrate_adaptive(integrand, 0.0, x_cut, 0.5 * tolerance);
}

std::vector<double> quartic_asymptotic_coeffs(int k_max) {
    if (k_max < 0 || k_max > 30)
        throw invalid_input_error("quartic_asymptotic_coeffs: k_max must be in [0, 30]");
    std::vector<double> a(static_cast<size_t>(k_max) + 1);
    a[0] = 1.0;
    for (int k = 0; k < k_max; ++k)
        a[static_cast<size_t>(k) + 1] =
            -a[static_cast<size_t>(k)] * (4.0 * k + 3.0) * (4.0 * k + 1.0) / (4.0 * (k + 1.0));
    return a;
}

double EulerFixture::stokes_magnitude(double g) const {
    return 2.0 * M_PI * std::exp(-1.0 / g);
}

EulerFixture euler_series_fixture() {
    EulerFixture fx;
    fx.series.coeffs.resize(12);
    double factorial = 1.0;
    for (int n = 0; n < 12; ++n) {
        if (n > 0) factorial *= n;
        fx.series.coeffs[static_cast<size_t>(n)] = factorial;
    }
    fx.pole = 1.0;
    return fx;
}

namespace {

// round with half-integers going down: fewer terms is the safer truncation
int round_half_down(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

} // namespace

OracleReport verify_resummation(const std::vector<double>& g_grid, int series_order, int pade_m,
                                int pade_n, const std::vector<double>& fitted_coeffs) {
    OracleReport report;
    const std::vector<double> a = quartic_asymptotic_coeffs(series_order);
    const BorelSeries borel = borel_transform(PowerSeries{a});

    for (size_t k = 0; k < a.size(); ++k) {
        CoefficientRow row;
        row.k = static_cast<int>(k);
        row.oracle = a[k];
        row.fitted = k < fitted_coeffs.size() ? fitted_coeffs[k]
                                              : std::numeric_limits<double>::quiet_NaN();
        report.coefficients.push_back(row);
    }

    PadeApproximant approx;
    bool have_pade = true;
    try {
        approx = pade(borel, pade_m, pade_n);
    } catch (const std::exception&) {
        have_pade = false;
    }

    // dominant singularity distance: smallest-magnitude real denominator root,
    // with the ratio-test radius as fallback
    double zeta1 = 0.0;
    if (have_pade) {
        for (double r : pade_denominator_roots(approx)) {
            const double d = std::abs(r);
            if (d > 0.0 && (zeta1 == 0.0 || d < zeta1)) zeta1 = d;
        }
    }
    if (zeta1 == 0.0) {
        if (const auto ratio = ratio_test(borel, 3)) zeta1 = ratio->radius;
    }
    report.zeta1 = zeta1;
    // the two (mutually inconsistent) printed values, recorded for comparison
    report.paper_zeta_a = 27.0 / 256.0 * std::pow(2.0 * M_PI / 3.0, 4.0);
    report.paper_zeta_b = std::pow(2.0, 5.0 / 3.0) / 3.0;

    std::vector<double> gs = g_grid;
    std::sort(gs.begin(), gs.end());
    for (double g : gs) {
        OracleRow row;
        row.g = g;
        try {
            row.exact = exact_quartic_Z(g, 1e-12);
        } catch (const std::exception&) {
            row.exact = std::numeric_limits<double>::quiet_NaN();
        }

        int n_opt = zeta1 > 0.0 ? round_half_down(zeta1 / g) : series_order;
        n_opt = std::clamp(n_opt, 1, series_order);
        row.truncation_order = n_opt;
        double partial = 0.0;
        double gpow = 1.0;
        for (int k = 0; k < n_opt; ++k) {
            partial += a[static_cast<size_t>(k)] * gpow;
            gpow *= g;
        }
        row.truncated = std::sqrt(M_PI * g) * partial;

        if (have_pade) {
            try {
                row.borel_pade = std::sqrt(M_PI * g) * laplace_resum(approx, g, 1e-12);
            } catch (const std::exception&) {
                row.borel_pade = std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            row.borel_pade = std::numeric_limits<double>::quiet_NaN();
        }

        if (std::isfinite(row.exact) && row.exact != 0.0) {
            row.rel_err_truncated = std::abs(row.truncated - row.exact) / std::abs(row.exact);
            row.rel_err_borel_pade = std::abs(row.borel_pade - row.exact) / std::abs(row.exact);
        } else {
            row.rel_err_truncated = std::numeric_limits<double>::quiet_NaN();
            row.rel_err_borel_pade = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace surge
