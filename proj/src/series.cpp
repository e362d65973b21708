#include "surge/series.hpp"

#include "surge/parallel.hpp"
#include "surge/polyroots.hpp"
#include "surge/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace surge {

namespace {

double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

double poly_derivative_at(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * c[i];
    return acc;
}

} // namespace

double PowerSeries::eval(double g) const { return horner(coeffs, g); }
double BorelSeries::eval(double zeta) const { return horner(coeffs, zeta); }

double PadeApproximant::eval(double t) const { return horner(num, t) / horner(den, t); }

const char* detector_name(Detector d) {
    switch (d) {
        case Detector::ratio: return "ratio";
        case Detector::scan: return "scan";
        case Detector::pade: return "pade";
    }
    return "?";
}

BorelSeries borel_transform(const PowerSeries& series) {
    if (series.coeffs.empty()) throw invalid_input_error("borel_transform: empty series");
    BorelSeries out;
    out.coeffs.resize(series.coeffs.size());
    double factorial = 1.0;
    for (size_t n = 0; n < series.coeffs.size(); ++n) {
        if (!std::isfinite(series.coeffs[n]))
            throw invalid_input_error("borel_transform: non-finite coefficient");
        if (n > 0) factorial *= static_cast<double>(n);
        out.coeffs[n] = series.coeffs[n] / factorial;
    }
    return out;
}

std::optional<RatioEstimate> ratio_test(const BorelSeries& borel, int tail_window) {
    if (tail_window < 1) return std::nullopt;
    const auto& b = borel.coeffs;
    // trailing run of nonzero coefficients
    int end = static_cast<int>(b.size());
    while (end > 0 && b[static_cast<size_t>(end - 1)] == 0.0) --end;
    int begin = end;
    while (begin > 0 && b[static_cast<size_t>(begin - 1)] != 0.0) --begin;
    if (end - begin < tail_window + 1) return std::nullopt;

    const int first = end - tail_window - 1;
    double sum = 0.0;
    int sign_flips = 0;
    for (int n = first; n + 1 < end; ++n) {
        const double bn = b[static_cast<size_t>(n)];
        const double bn1 = b[static_cast<size_t>(n + 1)];
        sum += std::abs(bn / bn1);
        if (bn * bn1 < 0.0) ++sign_flips;
    }
    RatioEstimate est;
    est.radius = sum / tail_window;
    est.oscillating = 2 * sign_flips > tail_window;
    return est;
}

namespace {

std::vector<Singularity> scan_impl(const BorelSeries& borel, double upper, int points,
                                   double threshold, bool parallel) {
    if (!(upper > 0.0)) throw invalid_input_error("scan_singularities: upper must be positive");
    if (points < 8) throw invalid_input_error("scan_singularities: need at least 8 points");

    std::vector<double> zeta(static_cast<size_t>(points));
    std::vector<double> mag(static_cast<size_t>(points));
    const auto eval_point = [&](int k) {
        const double z = upper * static_cast<double>(k + 1) / static_cast<double>(points);
        zeta[static_cast<size_t>(k)] = z;
        const double v = std::abs(borel.eval(z));
        // overflow marks the point saturated: divergence is the signal sought
        mag[static_cast<size_t>(k)] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    if (parallel)
        parallel_for(points, eval_point);
    else
        serial_for(points, eval_point);

    std::vector<Singularity> out;
    const auto strength_at = [&](int k) {
        const double v = mag[static_cast<size_t>(k)];
        return std::isinf(v) ? std::numeric_limits<double>::max() : v;
    };
    int k = 0;
    while (k < points) {
        if (!(mag[static_cast<size_t>(k)] > threshold)) {
            ++k;
            continue;
        }
        int run_end = k;
        while (run_end + 1 < points && mag[static_cast<size_t>(run_end + 1)] > threshold) ++run_end;
        // run entry estimates the divergence onset
        out.push_back({zeta[static_cast<size_t>(k)], Detector::scan, strength_at(k), {}});
        for (int t = k + 1; t < run_end; ++t) {
            if (mag[static_cast<size_t>(t)] > mag[static_cast<size_t>(t - 1)] &&
                mag[static_cast<size_t>(t)] > mag[static_cast<size_t>(t + 1)])
                out.push_back({zeta[static_cast<size_t>(t)], Detector::scan, strength_at(t), {}});
        }
        k = run_end + 1;
    }
    return out;
}

} // namespace

std::vector<Singularity> scan_singularities(const BorelSeries& borel, double upper, int points,
                                            double threshold) {
    return scan_impl(borel, upper, points, threshold, true);
}

std::vector<Singularity> scan_singularities_serial(const BorelSeries& borel, double upper,
                                                   int points, double threshold) {
    return scan_impl(borel, upper, points, threshold, false);
}

PadeApproximant pade(const BorelSeries& borel, int m, int n) {
    if (m < 0 || n < 1) throw invalid_input_error("pade: need m >= 0 and n >= 1");
    const auto& b = borel.coeffs;
    if (static_cast<size_t>(m + n + 1) > b.size())
        throw invalid_input_error("pade: not enough coefficients for [m/n]");

    const auto coeff = [&](int i) { return i >= 0 ? b[static_cast<size_t>(i)] : 0.0; };

    // sum_{j=0..n} q_j b_{k-j} = 0 for k = m+1 .. m+n, with q_0 = 1
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const int k = m + 1 + i;
        for (int j = 1; j <= n; ++j) A(i, j - 1) = coeff(k - j);
        rhs(i) = -coeff(k);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw degenerate_pade_error("pade: singular denominator system");
    const Eigen::VectorXd q = lu.solve(rhs);

    PadeApproximant out;
    out.den.resize(static_cast<size_t>(n) + 1);
    out.den[0] = 1.0;
    for (int j = 1; j <= n; ++j) out.den[static_cast<size_t>(j)] = q(j - 1);
    out.num.resize(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= std::min(i, n); ++j) acc += out.den[static_cast<size_t>(j)] * coeff(i - j);
        out.num[static_cast<size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> pade_denominator_roots(const PadeApproximant& approximant) {
    return real_polynomial_roots(approximant.den).real_roots;
}

PadePoles pade_poles(const PadeApproximant& approximant) {
    if (approximant.den.size() < 2) throw invalid_input_error("pade_poles: denominator degree < 1");
    const PolyRoots roots = real_polynomial_roots(approximant.den);
    PadePoles out;
    out.converged = roots.converged;
    for (double r : roots.real_roots) {
        if (!(r > 0.0) || !std::isfinite(r)) continue;
        const double dq = poly_derivative_at(approximant.den, r);
        if (dq == 0.0) continue;
        Singularity s;
        s.location = r;
        s.detector = Detector::pade;
        s.strength = 1.0 / std::abs(dq);
        s.residue = horner(approximant.num, r) / dq;
        out.poles.push_back(s);
    }
    return out;
}

double laplace_resum(const PadeApproximant& approximant, double g, double tolerance) {
    if (!(g > 0.0)) throw invalid_input_error("laplace_resum: g must be positive");
    if (!(tolerance > 0.0) || tolerance >= 1.0)
        throw invalid_input_error("laplace_resum: tolerance must be in (0,1)");

    const double upper = g * std::log(1.0 / tolerance);

    // symmetric excision windows around positive real poles of Q
    std::vector<std::pair<double, double>> cuts;
    for (double p : pade_denominator_roots(approximant)) {
        if (p <= 0.0 || p >= upper) continue;
        const double half = std::sqrt(tolerance) * std::max(1.0, std::abs(p));
        cuts.emplace_back(std::max(0.0, p - half), std::min(upper, p + half));
    }
    std::sort(cuts.begin(), cuts.end());

    const auto integrand = [&](double t) { return std::exp(-t / g) * approximant.eval(t); };
    const double panel_tol = tolerance * std::max(g, 1e-300);

    double total = 0.0;
    double lo = 0.0;
    for (const auto& [a, b] : cuts) {
        if (a > lo) total += integrate_adaptive(integrand, lo, a, panel_tol);
        lo = std::max(lo, b);
    }
    if (lo < upper) total += integrate_adaptive(integrand, lo, upper, panel_tol);
    return total / g;
}

TargetSet select_targets(const std::vector<Singularity>& candidates, double cutoff,
                         int max_targets) {
    if (!(cutoff > 0.0)) throw invalid_input_error("select_targets: cutoff must be positive");

    std::vector<Singularity> kept;
    for (const auto& c : candidates)
        if (c.location > 0.0 && c.location < cutoff && std::isfinite(c.location)) kept.push_back(c);
    std::sort(kept.begin(), kept.end(),
              [](const Singularity& a, const Singularity& b) { return a.location < b.location; });

    // merge within 1e-2 of the cutoff scale; strongest representative wins,
    // larger location breaks strength ties
    const double merge_tol = 1e-2 * cutoff;
    std::vector<Singularity> merged;
    for (const auto& c : kept) {
        if (!merged.empty() && c.location - merged.back().location <= merge_tol) {
            if (c.strength >= merged.back().strength) merged.back() = c;
        } else {
            merged.push_back(c);
        }
    }

    std::sort(merged.begin(), merged.end(), [](const Singularity& a, const Singularity& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return a.location > b.location;
    });
    if (max_targets >= 0 && merged.size() > static_cast<size_t>(max_targets))
        merged.resize(static_cast<size_t>(max_targets));

    TargetSet out;
    out.cutoff = cutoff;
    for (const auto& c : merged) out.targets.push_back(c.location);
    std::sort(out.targets.begin(), out.targets.end());
    return out;
}

} // namespace surge
