#pragma once

#include "surge/landscape.hpp"
#include "surge/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace surge {

struct estimation_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct fit_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EstimatorKind { mc, variational };

struct PartitionSample {
    double g = 0.0;
    double z = 0.0;      // > 0
    double stderr_ = 0.0;
    EstimatorKind estimator = EstimatorKind::mc;
};

struct CouplingRange {
    double g_min = 0.0;
    double g_max = 0.0;
    double score = 0.0;
};

// Diagonal Gaussian sampler q(theta) = N(mean, diag(exp(log_std)^2)) trained
// by the variational estimator; c tracks log Z.
struct VariationalSampler {
    std::vector<double> mean;
    std::vector<double> log_std;
    double c = 0.0;
};

// Importance-sampling proposal. The Gaussian default has variance
// (g + width^2) I centered at theta0; width = 0 reproduces the plain
// (2 pi g)^{d/2}-prefactor form.
struct Proposal {
    enum class Kind { gaussian, uniform_box } kind = Kind::gaussian;
    std::vector<double> center;   // gaussian
    double width = 0.0;           // gaussian: extra std added in quadrature
    std::vector<double> box_lo;   // uniform_box
    std::vector<double> box_hi;

    static Proposal gaussian(std::vector<double> center, double width = 0.0);
    static Proposal uniform_box(std::vector<double> lo, std::vector<double> hi);
};

struct AnalysisConfig {
    int grid_size = 24;          // S
    int series_order = 6;        // J
    double eps_scale = 1e-2;     // weight regulariser: eps = eps_scale * g_min
    int samples_per_g = 4096;    // N
    int quick_probes = 3;
    int quick_samples = 64;
    int scan_points = 128;
    double scan_threshold = 0.15; // fraction of max |B| on the scan grid
    int pade_m = 2;
    int pade_n = 3;
    int ratio_window = 3;
    int max_targets = 4;
    std::uint64_t seed = 0;
    EstimatorKind estimator = EstimatorKind::mc;
    double proposal_width = 0.0;
    bool normalize_prefactor = true; // divide samples by (2 pi g)^{d/2} before the fit
    // variational trainer
    int var_iterations = 800;
    double var_step = 0.05;
    int var_batch = 64;
    // synthetic injection: skip estimation and analyse these coefficients directly
    std::vector<double> inject_coeffs;
    double inject_cutoff = 0.0;

    void validate() const; // throws invalid_input_error
};

struct AnalysisDiagnostic {
    std::string stage;
    std::string message;
};

// Full output of the analysis pipeline; `targets` is what the optimizer uses.
struct AnalysisReport {
    std::optional<CouplingRange> range;
    std::vector<PartitionSample> samples;
    std::vector<double> coeffs;
    std::vector<double> borel_coeffs;
    std::vector<Singularity> singularities;
    TargetSet targets;
    std::vector<AnalysisDiagnostic> diagnostics;
};

// Importance-sampling estimate of Z(g) = integral exp(-L/g). Accumulates in
// log space; per-sample draws are counter-seeded so any evaluation order gives
// identical results. Throws estimation_failure when every weight underflows.
PartitionSample mc_partition(const ObjectiveFunction& objective, const Proposal& proposal,
                             double g, int n_samples, std::uint64_t seed);
PartitionSample mc_partition_serial(const ObjectiveFunction& objective, const Proposal& proposal,
                                    double g, int n_samples, std::uint64_t seed);

// Trains the diagonal-Gaussian sampler by reparameterised stochastic gradient
// and reads off c = log Z from the stationarity of the concave lower bound.
std::pair<PartitionSample, VariationalSampler>
variational_partition(const ObjectiveFunction& objective, double g, int iterations,
                      double step_size, int batch, std::uint64_t seed,
                      const std::vector<double>& theta0);

// Weighted least squares of z(g) by sum a_j g^j with weights 1/(g+eps);
// normal equations with column scaling. Throws fit_failure when rank deficient.
PowerSeries fit_series(const std::vector<PartitionSample>& samples, int order, double eps);

struct FitQuality {
    PowerSeries series;
    double r_squared = 0.0;
    double condition = 0.0; // of the raw weighted normal matrix
};

FitQuality fit_series_quality(const std::vector<PartitionSample>& samples, int order, double eps);

// Fraction of cheap probes across [g_min, g_max] that yield a finite positive
// estimate with stderr/z < 1.
double quick_test(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                  const CouplingRange& range, int probes, const AnalysisConfig& config);

// Algorithm: candidates (L_ref 10^i, L_ref 10^{i+2}), i = -6..1; quick-test
// gate at 0.7; full evaluation scores fit R^2 - 0.1 log10(condition).
std::optional<CouplingRange> coupling_range_search(const ObjectiveFunction& objective,
                                                   const std::vector<double>& theta0,
                                                   const AnalysisConfig& config);

// Z estimates on S log-spaced couplings; grid points evaluated in parallel
// with per-index seeds (bitwise equal to the serial path).
std::vector<PartitionSample> estimate_grid(const ObjectiveFunction& objective,
                                           const std::vector<double>& theta0, double g_min,
                                           double g_max, const AnalysisConfig& config);
std::vector<PartitionSample> estimate_grid_serial(const ObjectiveFunction& objective,
                                                  const std::vector<double>& theta0, double g_min,
                                                  double g_max, const AnalysisConfig& config);

// The full target pipeline: initial loss, range search, grid estimation,
// weighted fit, Borel transform, singularity detection (ratio, scan, Pade),
// target selection. Never throws; failures turn into diagnostics and an
// empty target set.
AnalysisReport analyze(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                       const AnalysisConfig& config);

TargetSet borel_analysis(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                         const AnalysisConfig& config);

} // namespace surge
