#pragma once

#include "surge/landscape.hpp"
#include "surge/partition.hpp"
#include "surge/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace surge {

enum class OptimizerKind { sgd, adam, adamw };

OptimizerKind optimizer_from_name(const std::string& name);
const char* optimizer_name(OptimizerKind k);

struct BaseOptimizerState {
    OptimizerKind kind = OptimizerKind::sgd;
    int t = 0; // completed steps
    double eta = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // adamw only
    std::vector<double> m;     // first moment
    std::vector<double> v;     // second moment

    static BaseOptimizerState make(OptimizerKind kind, int dim, double eta,
                                   double weight_decay = 0.0);
};

struct GuidanceState {
    TargetSet targets;
    double lambda = 0.0;
    double max_norm = 0.0; // <= 0 means unclipped
    std::optional<double> current_target;
    bool exhausted = false; // loss fell below every target: guidance stays off
    std::vector<double> alpha_history;
};

// max{zeta in targets : zeta < current_loss}, or nullopt
std::optional<double> select_target(const TargetSet& targets, double current_loss);

// alpha = 1 + lambda * min(|L - zeta| / L, 1); 1 when no target
double guidance_factor(double current_loss, std::optional<double> target, double lambda);

// Raw step direction (before eta and alpha): sgd -> -grad, adam -> bias
// corrected -m^/(sqrt(v^)+eps), adamw -> adam direction - weight_decay*theta.
// Advances the moment buffers and step count.
std::vector<double> base_update(BaseOptimizerState& state, const std::vector<double>& grad,
                                const std::vector<double>& params);

struct abort_step_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One guided step: pick target, compute alpha, take eta*alpha*direction,
// clip to max_norm, apply. Throws abort_step_error on a non-finite loss
// without touching params.
void surge_step(std::vector<double>& params, const std::vector<double>& grad,
                BaseOptimizerState& base, GuidanceState& guide, double current_loss);

struct TrajectoryPoint {
    int step = 0;
    double loss = 0.0;
    double alpha = 1.0;
    std::optional<double> target;
    double grad_norm = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<double> final_params;
    bool truncated = false;      // abort-step hit before the step budget
    std::string diagnostic;

    double final_loss() const { return points.empty() ? 0.0 : points.back().loss; }
};

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::sgd;
    double eta = 0.01;
    double weight_decay = 0.0;
    double lambda = 0.0;
    double max_norm = 0.0; // <= 0: default 10*eta
    int steps = 100;
};

// Full-batch loop recording loss/alpha/target/grad-norm per step. When
// `analysis` is empty the target set is computed once at theta0 with
// `analysis_config`.
Trajectory train(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                 const TrainConfig& config, std::optional<TargetSet> analysis,
                 const AnalysisConfig& analysis_config);

// Convenience: train with an explicit (possibly empty) target set.
Trajectory train(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                 const TrainConfig& config, const TargetSet& targets);

} // namespace surge
