#include "surge/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace surge {

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adam") return OptimizerKind::adam;
    if (name == "adamw") return OptimizerKind::adamw;
    throw invalid_input_error("unknown optimizer: " + name);
}

const char* optimizer_name(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::adam: return "adam";
        case OptimizerKind::adamw: return "adamw";
    }
    return "?";
}

BaseOptimizerState BaseOptimizerState::make(OptimizerKind kind, int dim, double eta,
                                            double weight_decay) {
    BaseOptimizerState s;
    s.kind = kind;
    s.eta = eta;
    s.weight_decay = weight_decay;
    if (kind != OptimizerKind::sgd) {
        s.m.assign(static_cast<size_t>(dim), 0.0);
        s.v.assign(static_cast<size_t>(dim), 0.0);
    }
    return s;
}

std::optional<double> select_target(const TargetSet& targets, double current_loss) {
    std::optional<double> best;
    for (double z : targets.targets)
        if (z < current_loss && (!best || z > *best)) best = z;
    return best;
}

double guidance_factor(double current_loss, std::optional<double> target, double lambda) {
    if (!target) return 1.0;
    const double gap = std::abs((current_loss - *target) / current_loss);
    return 1.0 + lambda * std::min(gap, 1.0);
}

std::vector<double> base_update(BaseOptimizerState& state, const std::vector<double>& grad,
                                const std::vector<double>& params) {
    if (grad.size() != params.size())
        throw invalid_input_error("base_update: gradient dimension mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) throw invalid_input_error("base_update: non-finite gradient");

    std::vector<double> dir(grad.size());
    if (state.kind == OptimizerKind::sgd) {
        for (size_t i = 0; i < grad.size(); ++i) dir[i] = -grad[i];
        ++state.t;
        return dir;
    }

    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, state.t);
    const double bc2 = 1.0 - std::pow(state.beta2, state.t);
    for (size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        dir[i] = -m_hat / (std::sqrt(v_hat) + state.eps);
        if (state.kind == OptimizerKind::adamw) dir[i] -= state.weight_decay * params[i];
    }
    return dir;
}

void surge_step(std::vector<double>& params, const std::vector<double>& grad,
                BaseOptimizerState& base, GuidanceState& guide, double current_loss) {
    if (!std::isfinite(current_loss)) throw abort_step_error("surge_step: non-finite loss");

    std::optional<double> target;
    if (!guide.exhausted && !guide.targets.empty()) {
        target = select_target(guide.targets, current_loss);
        // below every target there is no guidance information left; stay off
        if (!target) guide.exhausted = true;
    }
    guide.current_target = target;
    const double alpha = guidance_factor(current_loss, target, guide.lambda);

    std::vector<double> step = base_update(base, grad, params);
    for (double& s : step) s = base.eta * alpha * s;

    if (guide.max_norm > 0.0) {
        double norm_sq = 0.0;
        for (double s : step) norm_sq += s * s;
        const double norm = std::sqrt(norm_sq);
        if (norm > guide.max_norm) {
            const double rescale = guide.max_norm / norm;
            for (double& s : step) s *= rescale;
        }
    }
    for (size_t i = 0; i < params.size(); ++i) params[i] += step[i];
    guide.alpha_history.push_back(alpha);
}

Trajectory train(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                 const TrainConfig& config, const TargetSet& targets) {
    Trajectory traj;
    std::vector<double> params = theta0;

    BaseOptimizerState base =
        BaseOptimizerState::make(config.optimizer, objective.dim, config.eta, config.weight_decay);
    GuidanceState guide;
    guide.targets = targets;
    guide.lambda = config.lambda;
    guide.max_norm = config.max_norm > 0.0 ? config.max_norm : 10.0 * config.eta;

    for (int step = 0; step < config.steps; ++step) {
        const double loss = objective.eval(params);
        const std::vector<double> grad = objective.grad(params);
        double grad_norm_sq = 0.0;
        for (double g : grad) grad_norm_sq += g * g;
        try {
            surge_step(params, grad, base, guide, loss);
        } catch (const std::exception& e) {
            traj.truncated = true;
            traj.diagnostic = e.what();
            break;
        }
        traj.points.push_back(
            {step, loss, guide.alpha_history.back(), guide.current_target, std::sqrt(grad_norm_sq)});
    }
    traj.final_params = std::move(params);
    return traj;
}

Trajectory train(const ObjectiveFunction& objective, const std::vector<double>& theta0,
                 const TrainConfig& config, std::optional<TargetSet> analysis,
                 const AnalysisConfig& analysis_config) {
    const TargetSet targets =
        analysis ? *analysis : borel_analysis(objective, theta0, analysis_config);
    return train(objective, theta0, config, targets);
}

} // namespace surge
