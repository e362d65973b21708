#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surge {

struct invalid_input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_pade_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated asymptotic expansion sum a_j g^j, j = 0..order().
struct PowerSeries {
    std::vector<double> coeffs;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double g) const;
};

// Coefficients b_n = a_n / n! of the Borel image of a PowerSeries.
struct BorelSeries {
    std::vector<double> coeffs;

    double eval(double zeta) const;
};

// Rational approximant P/Q with Q(0) = 1.
struct PadeApproximant {
    std::vector<double> num; // degree m
    std::vector<double> den; // degree n, den[0] == 1

    double eval(double t) const;
};

enum class Detector { ratio, scan, pade };

const char* detector_name(Detector d);

struct Singularity {
    double location = 0.0; // position on the positive real axis
    Detector detector = Detector::scan;
    double strength = 0.0;                // detector-specific magnitude
    std::optional<double> residue = {};   // Stokes-constant estimate (pade only)
};

// Sorted positive critical-value candidates below the cutoff L0.
struct TargetSet {
    std::vector<double> targets; // strictly increasing
    double cutoff = 0.0;

    bool empty() const { return targets.empty(); }
};

BorelSeries borel_transform(const PowerSeries& series);

struct RatioEstimate {
    double radius = 0.0;
    bool oscillating = false; // tail signs alternate: nearest singularity off the positive axis
};

// Trailing-window average of |b_n / b_{n+1}|. Returns nullopt when the series
// does not end in at least tail_window+1 nonzero coefficients.
std::optional<RatioEstimate> ratio_test(const BorelSeries& borel, int tail_window);

// Evaluates |B(zeta)| on a uniform grid over (0, upper] and reports, for each
// run of above-threshold points, the run's entry point plus any interior
// strict local maxima. Overflowing evaluations count as above threshold.
std::vector<Singularity> scan_singularities(const BorelSeries& borel, double upper, int points,
                                            double threshold);
std::vector<Singularity> scan_singularities_serial(const BorelSeries& borel, double upper,
                                                   int points, double threshold);

// Pade approximant [m/n] matching the Taylor coefficients through order m+n.
// Throws degenerate_pade_error when the denominator system is singular.
PadeApproximant pade(const BorelSeries& borel, int m, int n);

struct PadePoles {
    std::vector<Singularity> poles; // positive real poles, ascending
    bool converged = true;
};

PadePoles pade_poles(const PadeApproximant& approximant);

// All real roots of the denominator, ascending (both signs). The smallest
// magnitude among them estimates the convergence radius of the source series.
std::vector<double> pade_denominator_roots(const PadeApproximant& approximant);

// (1/g) * integral_0^inf exp(-t/g) P(t)/Q(t) dt with positive real poles of Q
// excised symmetrically (principal value). Truncates where exp(-t/g) < tolerance.
double laplace_resum(const PadeApproximant& approximant, double g, double tolerance);

// Filter to (0, cutoff), merge candidates closer than 1e-2 of the cutoff
// (highest strength wins, larger location breaks ties), keep the max_targets
// strongest, sort ascending.
TargetSet select_targets(const std::vector<Singularity>& candidates, double cutoff,
                         int max_targets);

} // namespace surge
