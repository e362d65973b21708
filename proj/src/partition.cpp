#include "surge/partition.hpp"

#include "surge/parallel.hpp"
#include "surge/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace surge {

Proposal Proposal::gaussian(std::vector<double> center, double width) {
    Proposal p;
    p.kind = Kind::gaussian;
    p.center = std::move(center);
    p.width = width;
    return p;
}

Proposal Proposal::uniform_box(std::vector<double> lo, std::vector<double> hi) {
    Proposal p;
    p.kind = Kind::uniform_box;
    p.box_lo = std::move(lo);
    p.box_hi = std::move(hi);
    return p;
}

void AnalysisConfig::validate() const {
    if (series_order < 3) throw invalid_input_error("AnalysisConfig: series_order must be >= 3");
    if (grid_size < series_order + 2)
        throw invalid_input_error("AnalysisConfig: grid_size must be >= series_order + 2");
    if (samples_per_g < 16)
        throw invalid_input_error("AnalysisConfig: samples_per_g must be >= 16");
    if (scan_points < 8) throw invalid_input_error("AnalysisConfig: scan_points must be >= 8");
    if (!(scan_threshold > 0.0))
        throw invalid_input_error("AnalysisConfig: scan_threshold must be positive");
    if (pade_m < 0 || pade_n < 1) throw invalid_input_error("AnalysisConfig: bad pade orders");
    if (max_targets < 1) throw invalid_input_error("AnalysisConfig: max_targets must be >= 1");
    if (quick_probes < 3) throw invalid_input_error("AnalysisConfig: quick_probes must be >= 3");
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log-weight of one proposal draw: log( exp(-L/g) / q(theta) )
struct DrawResult {
    double log_weight;
};

DrawResult mc_draw(const ObjectiveFunction& objective, const Proposal& proposal, double g,
                   std::uint64_t seed, std::uint64_t sample_index) {
    const int d = objective.dim;
    std::vector<double> theta(static_cast<size_t>(d));
    double log_q = 0.0;
    if (proposal.kind == Proposal::Kind::gaussian) {
        const double var = g + proposal.width * proposal.width;
        const double std_dev = std::sqrt(var);
        double sq = 0.0;
        for (int j = 0; j < d; ++j) {
            const double eps = rng::normal(seed, sample_index,
                                           static_cast<std::uint64_t>(j));
            theta[static_cast<size_t>(j)] = proposal.center[static_cast<size_t>(j)] + std_dev * eps;
            sq += eps * eps;
        }
        log_q = -0.5 * d * (kLog2Pi + std::log(var)) - 0.5 * sq;
    } else {
        double log_vol = 0.0;
        for (int j = 0; j < d; ++j) {
            const double u = rng::uniform(seed, sample_index, static_cast<std::uint64_t>(j));
            const double lo = proposal.box_lo[static_cast<size_t>(j)];
            const double hi = proposal.box_hi[static_cast<size_t>(j)];
            theta[static_cast<size_t>(j)] = lo + u * (hi - lo);
            log_vol += std::log(hi - lo);
        }
        log_q = -log_vol;
    }
    return {-objective.eval(theta) / g - log_q};
}

PartitionSample mc_impl(const ObjectiveFunction& objective, const Proposal& proposal, double g,
                        int n_samples, std::uint64_t seed, bool parallel) {
    if (!(g > 0.0)) throw invalid_input_error("mc_partition: g must be positive");
    if (n_samples < 16) throw invalid_input_error("mc_partition: n_samples must be >= 16");

    std::vector<double> log_w(static_cast<size_t>(n_samples));
    const auto fill = [&](int i) {
        log_w[static_cast<size_t>(i)] =
            mc_draw(objective, proposal, g, seed, static_cast<std::uint64_t>(i)).log_weight;
    };
    if (parallel)
        parallel_for(n_samples, fill);
    else
        serial_for(n_samples, fill);

    double peak = -std::numeric_limits<double>::infinity();
    for (double lw : log_w) peak = std::max(peak, lw);
    if (!std::isfinite(peak))
        throw estimation_failure("mc_partition: all importance weights vanished");

    // fixed-order reduction keeps the result independent of thread count
    double sum = 0.0;
    for (double lw : log_w) sum += std::exp(lw - peak);
    const double mean = sum / n_samples;
    double var = 0.0;
    for (double lw : log_w) {
        const double dlt = std::exp(lw - peak) - mean;
        var += dlt * dlt;
    }
    var /= (n_samples - 1);

    PartitionSample out;
    out.g = g;
    out.z = std::exp(peak) * mean;
    out.stderr_ = std::exp(peak) * std::sqrt(var / n_samples);
    out.estimator = EstimatorKind::mc;
    if (!(out.z > 0.0) || !std::isfinite(out.z))
        throw estimation_failure("mc_partition: estimate is not a positive finite number");
    return out;
}

} // namespace

PartitionSample mc_partition(const ObjectiveFunction& objective, const Proposal& proposal,
                             double g, int n_samples, std::uint64_t seed) {
    return mc_impl(objective, proposal, g, n_samples, seed, true);
}

PartitionSample mc_partition_serial(const ObjectiveFunction& objective, const Proposal& proposal,
                                    double g, int n_samples, std::uint64_t seed) {
    return mc_impl(objective, proposal, g, n_samples, seed, false);
}

std::pair<PartitionSample, VariationalSampler>
variational_partition(const ObjectiveFunction& objective, double g, int iterations,
                      double step_size, int batch, std::uint64_t seed,
                      const std::vector<double>& theta0) {
    if (!(g > 0.0)) throw invalid_input_error("variational_partition: g must be positive");
    if (iterations < 1) throw invalid_input_error("variational_partition: iterations must be >= 1");
    const int d = objective.dim;

    VariationalSampler sampler;
    sampler.mean = theta0;
    sampler.log_std.assign(static_cast<size_t>(d), 0.5 * std::log(g));

    // Adam on (mean, log_std); ascent on the reparameterised lower bound of
    // log Z from q's side:  E_q[-L/g - log q]
    std::vector<double> m(static_cast<size_t>(2 * d), 0.0), v(static_cast<size_t>(2 * d), 0.0);
    const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
    const double c_guard = 1e3 * std::max(1.0, std::abs(std::log(g)));

    std::vector<double> theta(static_cast<size_t>(d));
    std::vector<double> eps(static_cast<size_t>(d));
    for (int it = 1; it <= iterations; ++it) {
        std::vector<double> g_mean(static_cast<size_t>(d), 0.0);
        std::vector<double> g_lstd(static_cast<size_t>(d), 0.0);
        for (int s = 0; s < batch; ++s) {
            const std::uint64_t stream = 0x10000000ULL + static_cast<std::uint64_t>(it);
            for (int j = 0; j < d; ++j) {
                eps[static_cast<size_t>(j)] = rng::normal(
                    seed, stream, static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(d) +
                                      static_cast<std::uint64_t>(j));
                theta[static_cast<size_t>(j)] =
                    sampler.mean[static_cast<size_t>(j)] +
                    std::exp(sampler.log_std[static_cast<size_t>(j)]) * eps[static_cast<size_t>(j)];
            }
            const std::vector<double> grad_l = objective.grad(theta);
            for (int j = 0; j < d; ++j) {
                const double gl = grad_l[static_cast<size_t>(j)] / g;
                g_mean[static_cast<size_t>(j)] -= gl;
                g_lstd[static_cast<size_t>(j)] -=
                    gl * std::exp(sampler.log_std[static_cast<size_t>(j)]) * eps[static_cast<size_t>(j)];
            }
        }
        const double inv_b = 1.0 / batch;
        const double bc1 = 1.0 - std::pow(b1, it);
        const double bc2 = 1.0 - std::pow(b2, it);
        for (int j = 0; j < 2 * d; ++j) {
            // entropy term contributes +1 to every log_std gradient
            const double raw = (j < d) ? g_mean[static_cast<size_t>(j)] * inv_b
                                       : g_lstd[static_cast<size_t>(j - d)] * inv_b + 1.0;
            const double gneg = -raw; // descend on the negated bound
            m[static_cast<size_t>(j)] = b1 * m[static_cast<size_t>(j)] + (1.0 - b1) * gneg;
            v[static_cast<size_t>(j)] = b2 * v[static_cast<size_t>(j)] + (1.0 - b2) * gneg * gneg;
            const double step = step_size * (m[static_cast<size_t>(j)] / bc1) /
                                (std::sqrt(v[static_cast<size_t>(j)] / bc2) + adam_eps);
            if (j < d)
                sampler.mean[static_cast<size_t>(j)] -= step;
            else
                sampler.log_std[static_cast<size_t>(j - d)] -= step;
        }
    }

    // stationarity of the bound in c:  c = log E_q[ exp(-L/g) / q ]
    const int final_n = 16 * batch;
    std::vector<double> log_w(static_cast<size_t>(final_n));
    for (int s = 0; s < final_n; ++s) {
        double log_q = 0.0;
        for (int j = 0; j < d; ++j) {
            const double e = rng::normal(seed, 0x20000000ULL,
                                         static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(d) +
                                             static_cast<std::uint64_t>(j));
            const double ls = sampler.log_std[static_cast<size_t>(j)];
            theta[static_cast<size_t>(j)] = sampler.mean[static_cast<size_t>(j)] + std::exp(ls) * e;
            log_q += -ls - 0.5 * kLog2Pi - 0.5 * e * e;
        }
        log_w[static_cast<size_t>(s)] = -objective.eval(theta) / g - log_q;
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (double lw : log_w) peak = std::max(peak, lw);
    if (!std::isfinite(peak))
        throw estimation_failure("variational_partition: weights vanished");
    double sum = 0.0;
    for (double lw : log_w) sum += std::exp(lw - peak);
    const double mean_w = sum / final_n;
    double var = 0.0;
    for (double lw : log_w) {
        const double dlt = std::exp(lw - peak) - mean_w;
        var += dlt * dlt;
    }
    var /= (final_n - 1);

    sampler.c = peak + std::log(mean_w);
    if (!std::isfinite(sampler.c) || std::abs(sampler.c) > c_guard)
        throw estimation_failure("variational_partition: c diverged");

    PartitionSample out;
    out.g = g;
    out.z = std::exp(sampler.c);
    out.stderr_ = out.z * std::sqrt(var / final_n) / mean_w;
    out.estimator = EstimatorKind::variational;
    if (!(out.z > 0.0) || !std::isfinite(out.z))
        throw estimation_failure("variational_partition: estimate is not positive finite");
    return {out, sampler};
}

FitQuality fit_series_quality(const std::vector<PartitionSample>& samples, int order, double eps) {
    const int s_count = static_cast<int>(samples.size());
    const int n_coef = order + 1;
    if (s_count < order + 2)
        throw fit_failure("fit_series: need at least order + 2 samples");
    for (int a = 0; a < s_count; ++a)
        for (int b = a + 1; b < s_count; ++b)
            if (samples[static_cast<size_t>(a)].g == samples[static_cast<size_t>(b)].g)
                throw fit_failure("fit_series: duplicate coupling values");

    Eigen::MatrixXd design(s_count, n_coef);
    Eigen::VectorXd values(s_count);
    Eigen::VectorXd weights(s_count);
    for (int s = 0; s < s_count; ++s) {
        const double g = samples[static_cast<size_t>(s)].g;
        double p = 1.0;
        for (int j = 0; j < n_coef; ++j) {
            design(s, j) = p;
            p *= g;
        }
        values(s) = samples[static_cast<size_t>(s)].z;
        weights(s) = 1.0 / (g + eps);
    }

    const Eigen::MatrixXd wx = weights.asDiagonal() * design;
    const Eigen::MatrixXd normal = design.transpose() * wx;
    const Eigen::VectorXd rhs = design.transpose() * (weights.asDiagonal() * values);

    // raw conditioning of the weighted normal matrix; the solve itself uses
    // column scaling
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    double cond = std::numeric_limits<double>::infinity();
    if (eig.info() == Eigen::Success) {
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo > 0.0) cond = hi / lo;
    }

    Eigen::VectorXd scale(n_coef);
    for (int j = 0; j < n_coef; ++j) {
        const double dj = normal(j, j);
        if (!(dj > 0.0)) throw fit_failure("fit_series: rank-deficient design matrix");
        scale(j) = 1.0 / std::sqrt(dj);
    }
    const Eigen::MatrixXd scaled = scale.asDiagonal() * normal * scale.asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    if (ldlt.info() != Eigen::Success)
        throw fit_failure("fit_series: normal equations not solvable");
    const Eigen::VectorXd solution = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * rhs);
    if (!solution.allFinite()) throw fit_failure("fit_series: non-finite solution");

    FitQuality out;
    out.series.coeffs.assign(solution.data(), solution.data() + n_coef);
    out.condition = cond;

    const Eigen::VectorXd pred = design * solution;
    const double mean_z = values.mean();
    double ss_res = 0.0, ss_tot = 0.0;
    for (int s = 0; s < s_count; ++s) {
        ss_res += weights(s) * (values(s) - pred(s)) * (values(s) - pred(s));
        ss_tot += weights(s) * (values(s) - mean_z) * (values(s) - mean_z);
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    return out;
}

PowerSeries fit_series(const std::vector<PartitionSample>& samples, int order, double eps) {
    return fit_series_quality(samples, order, eps).series;
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

PartitionSample estimate_one(const ObjectiveFunction& objective,
                             const std::vector<double>& theta0, double g,
                             const AnalysisConfig& config, std::uint64_t seed) {
    if (config.estimator == EstimatorKind::variational)
        return variational_partition(objective, g, config.var_iterations, config.var_step,
                                     config.var_batch, seed, theta0)
            .first;
    const Proposal prop = Proposal::gaussian(theta0, config.proposal_width);
    return mc_partition_serial(objective, prop, g, config.samples_per_g, seed);
}

std::vector<PartitionSample> grid_impl(const ObjectiveFunction& objective,
                                       const std::vector<double>& theta0, double g_min,
                                       double g_max, const AnalysisConfig& config, bool parallel) {
    const auto gs = log_spaced(g_min, g_max, config.grid_size);
    std::vector<PartitionSample> samples(gs.size());
    std::vector<char> failed(gs.size(), 0);
    const auto eval_point = [&](int k) {
        // per-index seed stream keeps parallel and serial runs identical
        const std::uint64_t seed_k = rng::key(config.seed, 0x5eedULL, static_cast<std::uint64_t>(k));
        try {
            samples[static_cast<size_t>(k)] =
                estimate_one(objective, theta0, gs[static_cast<size_t>(k)], config, seed_k);
        } catch (const std::exception&) {
            failed[static_cast<size_t>(k)] = 1;
        }
    };
    if (parallel)
        parallel_for(static_cast<int>(gs.size()), eval_point);
    else
        serial_for(static_cast<int>(gs.size()), eval_point);
    for (char f : failed)
        if (f) throw estimation_failure("estimate_grid: estimation failed at a grid point");
    return samples;
}

} // namespace

std::vector<PartitionSample> estimate_grid(const ObjectiveFunction& objective,
                                           const std::vector<double>& theta0, double g_min,
                                           double g_max, const AnalysisConfig& config) {
    return grid_impl(objective, theta0, g_min, g_max, config, true);
}

std::vector<PartitionSample> estimate_grid_serial(const ObjectiveFunction& objective,
                                                  const std::vector<double>& theta0, double g_min,
                                                  double g_max, const AnalysisConfig& config) {
    return grid_impl(objective, theta0, g_min, g_max, config, false);
}

double quick_test(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                  const CouplingRange& range, int probes, const AnalysisConfig& config) {
    if (probes < 3) throw invalid_input_error("quick_test: probes must be >= 3");
    const auto gs = log_spaced(range.g_min, range.g_max, probes);
    const Proposal prop = Proposal::gaussian(theta0, config.proposal_width);
    int ok = 0;
    for (int p = 0; p < probes; ++p) {
        const std::uint64_t seed_p =
            rng::key(config.seed, 0x9c1cULL, static_cast<std::uint64_t>(p) + 7919);
        try {
            const PartitionSample s = mc_partition_serial(objective, prop, gs[static_cast<size_t>(p)],
                                                          config.quick_samples, seed_p);
            if (std::isfinite(s.z) && s.z > 0.0 && s.stderr_ / s.z < 1.0) ++ok;
        } catch (const std::exception&) {
        }
    }
    return static_cast<double>(ok) / probes;
}

std::optional<CouplingRange> coupling_range_search(const ObjectiveFunction& objective,
                                                   const std::vector<double>& theta0,
                                                   const AnalysisConfig& config) {
    const double l_ref = objective.eval(theta0);
    if (!(l_ref > 0.0)) throw invalid_input_error("coupling_range_search: L(theta0) must be positive");

    std::optional<CouplingRange> best;
    for (int i = -6; i <= 1; ++i) {
        CouplingRange cand;
        cand.g_min = l_ref * std::pow(10.0, i);
        cand.g_max = l_ref * std::pow(10.0, i + 2);
        if (quick_test(objective, theta0, cand, config.quick_probes, config) < 0.7) continue;
        try {
            const auto samples =
                estimate_grid(objective, theta0, cand.g_min, cand.g_max, config);
            std::vector<PartitionSample> fitted = samples;
            if (config.normalize_prefactor) {
                for (auto& s : fitted)
                    s.z /= std::pow(2.0 * M_PI * s.g, 0.5 * objective.dim);
                for (const auto& s : fitted)
                    if (!std::isfinite(s.z) || !(s.z > 0.0))
                        throw estimation_failure("normalisation overflowed");
            }
            const FitQuality fit =
                fit_series_quality(fitted, config.series_order, config.eps_scale * cand.g_min);
            cand.score = fit.r_squared - 0.1 * std::log10(fit.condition);
        } catch (const std::exception&) {
            continue;
        }
        if (!best || cand.score > best->score) best = cand;
    }
    return best;
}

namespace {

void note(AnalysisReport& report, const std::string& stage, const std::string& message) {
    report.diagnostics.push_back({stage, message});
}

void detect_and_select(AnalysisReport& report, double cutoff, const AnalysisConfig& config) {
    const BorelSeries borel{report.borel_coeffs};

    // ratio test: only a non-oscillating radius inside (0, L0) is a candidate
    if (const auto ratio = ratio_test(borel, config.ratio_window)) {
        if (!ratio->oscillating && ratio->radius > 0.0 && ratio->radius < cutoff)
            report.singularities.push_back({ratio->radius, Detector::ratio, 1.0, {}});
        else if (ratio->oscillating)
            note(report, "ratio", "tail oscillates: nearest singularity off the positive axis");
    } else {
        note(report, "ratio", "too few nonzero trailing coefficients");
    }

    // direct scan, thresholded at a fraction of the grid maximum of |B|
    double peak = 0.0;
    for (int k = 1; k <= config.scan_points; ++k) {
        const double z = cutoff * static_cast<double>(k) / config.scan_points;
        const double v = std::abs(borel.eval(z));
        if (std::isfinite(v))
            peak = std::max(peak, v);
        else
            peak = std::numeric_limits<double>::max();
    }
    if (peak > 0.0) {
        const double tau = config.scan_threshold * peak;
        for (const auto& s : scan_singularities(borel, cutoff, config.scan_points, tau))
            report.singularities.push_back(s);
    }

    // Pade poles; a degenerate table retries with a smaller denominator
    int n = config.pade_n;
    const int usable = static_cast<int>(report.borel_coeffs.size()) - 1;
    while (n >= 1) {
        const int m = std::min(config.pade_m, usable - n);
        if (m < 0) break;
        try {
            const PadePoles poles = pade_poles(pade(borel, m, n));
            if (!poles.converged) note(report, "pade", "root finder did not fully converge");
            for (const auto& p : poles.poles) report.singularities.push_back(p);
            break;
        } catch (const degenerate_pade_error&) {
            --n;
        } catch (const std::exception& e) {
            note(report, "pade", e.what());
            break;
        }
    }
    if (n < 1) note(report, "pade", "pade table degenerate for all denominator degrees");

    report.targets = select_targets(report.singularities, cutoff, config.max_targets);
    if (report.targets.empty()) note(report, "select", "no divergence detected");
}

} // namespace

AnalysisReport analyze(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                       const AnalysisConfig& config) {
    AnalysisReport report;
    try {
        config.validate();
    } catch (const std::exception& e) {
        note(report, "config", e.what());
        return report;
    }

    // synthetic injection: analyse supplied coefficients directly
    if (!config.inject_coeffs.empty()) {
        const double cutoff = config.inject_cutoff;
        if (!(cutoff > 0.0)) {
            note(report, "config", "inject_cutoff must be positive");
            return report;
        }
        report.coeffs = config.inject_coeffs;
        try {
            report.borel_coeffs = borel_transform(PowerSeries{report.coeffs}).coeffs;
            report.targets.cutoff = cutoff;
            detect_and_select(report, cutoff, config);
        } catch (const std::exception& e) {
            note(report, "borel", e.what());
        }
        return report;
    }

    double cutoff = 0.0;
    try {
        cutoff = objective.eval(theta0);
        report.targets.cutoff = cutoff;
        if (!(cutoff > 0.0)) {
            note(report, "init", "initial objective value must be positive");
            return report;
        }

        // a flat landscape has no structure below the current level and makes
        // the partition integral ill-posed; bail out before estimating
        {
            const double spread = std::sqrt(cutoff + config.proposal_width * config.proposal_width);
            bool flat = true;
            for (int p = 0; p < 32 && flat; ++p) {
                std::vector<double> probe(theta0);
                for (int j = 0; j < objective.dim; ++j)
                    probe[static_cast<size_t>(j)] +=
                        spread * rng::normal(config.seed, 0xf1a7ULL,
                                             static_cast<std::uint64_t>(p) * objective.dim +
                                                 static_cast<std::uint64_t>(j));
                flat = std::abs(objective.eval(probe) - cutoff) <= 1e-9 * std::max(1.0, cutoff);
            }
            if (flat) {
                note(report, "landscape", "no divergence detected: objective is flat");
                return report;
            }
        }

        const auto range = coupling_range_search(objective, theta0, config);
        if (!range) {
            note(report, "range", "no usable coupling range");
            return report;
        }
        report.range = *range;

        report.samples = estimate_grid(objective, theta0, range->g_min, range->g_max, config);

        std::vector<PartitionSample> fitted = report.samples;
        if (config.normalize_prefactor) {
            for (auto& s : fitted) s.z /= std::pow(2.0 * M_PI * s.g, 0.5 * objective.dim);
            for (const auto& s : fitted)
                if (!std::isfinite(s.z) || !(s.z > 0.0))
                    throw estimation_failure("prefactor normalisation overflowed");
        }
        report.coeffs =
            fit_series(fitted, config.series_order, config.eps_scale * range->g_min).coeffs;
        report.borel_coeffs = borel_transform(PowerSeries{report.coeffs}).coeffs;
        detect_and_select(report, cutoff, config);
    } catch (const std::exception& e) {
        note(report, "pipeline", e.what());
        report.targets = TargetSet{{}, cutoff};
    }
    return report;
}

TargetSet borel_analysis(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                         const AnalysisConfig& config) {
    return analyze(objective, theta0, config).targets;
}

} // namespace surge
