#include "surge/landscape.hpp"

#include "surge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace surge {

MLP::MLP(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw invalid_input_error("MLP: need at least input and output layer");
    for (int s : sizes_)
        if (s < 1) throw invalid_input_error("MLP: layer sizes must be positive");
    for (size_t l = 0; l + 1 < sizes_.size(); ++l)
        param_count_ += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
}

std::vector<double> MLP::init_params(std::uint64_t seed) const {
    std::vector<double> params(static_cast<size_t>(param_count_), 0.0);
    // symmetric uniform scaled by 1/sqrt(fan_in); biases start at zero
    size_t idx = 0;
    std::uint64_t counter = 0;
    for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
        const size_t n = static_cast<size_t>(sizes_[l] * sizes_[l + 1]);
        for (size_t i = 0; i < n; ++i)
            params[idx++] = (2.0 * rng::uniform(seed, 1, counter++) - 1.0) * scale;
    }
    return params;
}

namespace {

struct LayerView {
    size_t w_offset, b_offset;
    int in, out;
};

std::vector<LayerView> layer_views(const std::vector<int>& sizes) {
    std::vector<LayerView> views;
    size_t w = 0;
    size_t b = 0;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) b += static_cast<size_t>(sizes[l] * sizes[l + 1]);
    // biases are stored after all weight blocks
    size_t bias = b;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        views.push_back({w, bias, sizes[l], sizes[l + 1]});
        w += static_cast<size_t>(sizes[l] * sizes[l + 1]);
        bias += static_cast<size_t>(sizes[l + 1]);
    }
    return views;
}

// forward pass keeping activations for backprop
void forward_all(const std::vector<int>& sizes, const std::vector<double>& params, double x,
                 std::vector<std::vector<double>>& acts) {
    const auto views = layer_views(sizes);
    acts.assign(sizes.size(), {});
    acts[0] = {x};
    for (size_t l = 0; l < views.size(); ++l) {
        const auto& v = views[l];
        const bool last = (l + 1 == views.size());
        std::vector<double> z(static_cast<size_t>(v.out));
        for (int o = 0; o < v.out; ++o) {
            double acc = params[v.b_offset + static_cast<size_t>(o)];
            for (int i = 0; i < v.in; ++i)
                acc += params[v.w_offset + static_cast<size_t>(o * v.in + i)] *
                       acts[l][static_cast<size_t>(i)];
            z[static_cast<size_t>(o)] = last ? acc : std::tanh(acc);
        }
        acts[l + 1] = std::move(z);
    }
}

} // namespace

std::vector<double> MLP::forward(const std::vector<double>& params, double x) const {
    std::vector<std::vector<double>> acts;
    forward_all(sizes_, params, x, acts);
    return acts.back();
}

void MLP::backward(const std::vector<double>& params, double x,
                   const std::vector<double>& output_grad,
                   std::vector<double>& param_grad) const {
    const auto views = layer_views(sizes_);
    std::vector<std::vector<double>> acts;
    forward_all(sizes_, params, x, acts);

    std::vector<double> delta = output_grad;
    for (size_t l = views.size(); l-- > 0;) {
        const auto& v = views[l];
        for (int o = 0; o < v.out; ++o) {
            const double d = delta[static_cast<size_t>(o)];
            param_grad[v.b_offset + static_cast<size_t>(o)] += d;
            for (int i = 0; i < v.in; ++i)
                param_grad[v.w_offset + static_cast<size_t>(o * v.in + i)] +=
                    d * acts[l][static_cast<size_t>(i)];
        }
        if (l == 0) break;
        std::vector<double> prev(static_cast<size_t>(v.in), 0.0);
        for (int i = 0; i < v.in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < v.out; ++o)
                acc += params[v.w_offset + static_cast<size_t>(o * v.in + i)] *
                       delta[static_cast<size_t>(o)];
            const double a = acts[l][static_cast<size_t>(i)];
            prev[static_cast<size_t>(i)] = acc * (1.0 - a * a); // tanh'
        }
        delta = std::move(prev);
    }
}

Dataset synthetic_1d_dataset(int n_points, double x_lo, double x_hi, std::uint64_t seed) {
    if (n_points < 1) throw invalid_input_error("synthetic_1d_dataset: n_points must be positive");
    Dataset data;
    data.inputs.resize(static_cast<size_t>(n_points));
    data.targets.resize(static_cast<size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
        const double x = x_lo + (x_hi - x_lo) * rng::uniform(seed, 2, static_cast<std::uint64_t>(k));
        data.inputs[static_cast<size_t>(k)] = x;
        data.targets[static_cast<size_t>(k)] =
            std::sin(2.0 * x) + 0.5 * std::cos(5.0 * x) + 0.3 * std::sin(10.0 * x) + 0.1 * x * x;
    }
    return data;
}

ObjectiveFunction mse_objective(const MLP& model, const Dataset& data) {
    if (model.layer_sizes().back() != 1)
        throw invalid_input_error("mse_objective: model output dimension must match targets");
    if (data.inputs.size() != data.targets.size())
        throw invalid_input_error("mse_objective: input/target length mismatch");
    const MLP net = model;
    const Dataset d = data;
    ObjectiveFunction obj;
    obj.dim = net.parameter_count();
    obj.eval = [net, d](const std::vector<double>& params) {
        double acc = 0.0;
        for (size_t k = 0; k < d.size(); ++k) {
            const double r = net.forward(params, d.inputs[k])[0] - d.targets[k];
            acc += r * r;
        }
        return acc / (2.0 * static_cast<double>(d.size()));
    };
    obj.grad = [net, d](const std::vector<double>& params) {
        std::vector<double> g(params.size(), 0.0);
        const double inv_k = 1.0 / static_cast<double>(d.size());
        for (size_t k = 0; k < d.size(); ++k) {
            const double r = net.forward(params, d.inputs[k])[0] - d.targets[k];
            net.backward(params, d.inputs[k], {r * inv_k}, g);
        }
        return g;
    };
    return obj;
}

ObjectiveFunction cross_entropy_objective(const MLP& model, const Dataset& data) {
    const int classes = model.layer_sizes().back();
    for (double t : data.targets) {
        const int c = static_cast<int>(t);
        if (c < 0 || c >= classes)
            throw invalid_input_error("cross_entropy_objective: class index out of range");
    }
    const MLP net = model;
    const Dataset d = data;
    ObjectiveFunction obj;
    obj.dim = net.parameter_count();

    const auto log_softmax = [](const std::vector<double>& logits) {
        double mx = logits[0];
        for (double v : logits) mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : logits) sum += std::exp(v - mx);
        const double lse = mx + std::log(sum);
        std::vector<double> out(logits.size());
        for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
        return out;
    };

    obj.eval = [net, d, log_softmax](const std::vector<double>& params) {
        double acc = 0.0;
        for (size_t k = 0; k < d.size(); ++k) {
            const auto ls = log_softmax(net.forward(params, d.inputs[k]));
            acc -= ls[static_cast<size_t>(d.targets[k])];
        }
        return acc;
    };
    obj.grad = [net, d, log_softmax](const std::vector<double>& params) {
        std::vector<double> g(params.size(), 0.0);
        for (size_t k = 0; k < d.size(); ++k) {
            const auto ls = log_softmax(net.forward(params, d.inputs[k]));
            std::vector<double> dlogits(ls.size());
            for (size_t c = 0; c < ls.size(); ++c) dlogits[c] = std::exp(ls[c]);
            dlogits[static_cast<size_t>(d.targets[k])] -= 1.0;
            net.backward(params, d.inputs[k], dlogits, g);
        }
        return g;
    };
    return obj;
}

PotentialKind potential_from_name(const std::string& name) {
    if (name == "quadratic") return PotentialKind::quadratic;
    if (name == "quartic") return PotentialKind::quartic;
    if (name == "double_well") return PotentialKind::double_well;
    if (name == "tilted_double_well") return PotentialKind::tilted_double_well;
    throw invalid_input_error("unknown potential: " + name);
}

ObjectiveFunction analytic_potential(PotentialKind kind) {
    ObjectiveFunction obj;
    obj.dim = 1;
    switch (kind) {
        case PotentialKind::quadratic:
            obj.eval = [](const std::vector<double>& t) { return 0.5 * t[0] * t[0]; };
            obj.grad = [](const std::vector<double>& t) { return std::vector<double>{t[0]}; };
            break;
        case PotentialKind::quartic:
            obj.eval = [](const std::vector<double>& t) {
                const double x = t[0];
                return x * x + x * x * x * x;
            };
            obj.grad = [](const std::vector<double>& t) {
                const double x = t[0];
                return std::vector<double>{2.0 * x + 4.0 * x * x * x};
            };
            break;
        case PotentialKind::double_well:
            obj.eval = [](const std::vector<double>& t) {
                const double u = t[0] * t[0] - 1.0;
                return u * u;
            };
            obj.grad = [](const std::vector<double>& t) {
                const double x = t[0];
                return std::vector<double>{4.0 * x * (x * x - 1.0)};
            };
            break;
        case PotentialKind::tilted_double_well:
            // +1 offset keeps every critical value positive
            obj.eval = [](const std::vector<double>& t) {
                const double u = t[0] * t[0] - 1.0;
                return u * u + 0.3 * t[0] + 1.0;
            };
            obj.grad = [](const std::vector<double>& t) {
                const double x = t[0];
                return std::vector<double>{4.0 * x * (x * x - 1.0) + 0.3};
            };
            break;
    }
    return obj;
}

ObjectiveFunction isotropic_quadratic(int dim) {
    if (dim < 1) throw invalid_input_error("isotropic_quadratic: dim must be positive");
    ObjectiveFunction obj;
    obj.dim = dim;
    obj.eval = [](const std::vector<double>& t) {
        double acc = 0.0;
        for (double v : t) acc += v * v;
        return 0.5 * acc;
    };
    obj.grad = [](const std::vector<double>& t) { return t; };
    return obj;
}

ObjectiveFunction constant_objective(int dim, double value) {
    ObjectiveFunction obj;
    obj.dim = dim;
    obj.eval = [value](const std::vector<double>&) { return value; };
    obj.grad = [dim](const std::vector<double>&) { return std::vector<double>(static_cast<size_t>(dim), 0.0); };
    return obj;
}

namespace {

// bisection for a sign change of f on [lo,hi]
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) return mid;
        if ((flo < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> critical_values(PotentialKind kind) {
    const ObjectiveFunction obj = analytic_potential(kind);
    std::vector<double> stationary;
    switch (kind) {
        case PotentialKind::quadratic:
        case PotentialKind::quartic: stationary = {0.0}; break;
        case PotentialKind::double_well: stationary = {-1.0, 0.0, 1.0}; break;
        case PotentialKind::tilted_double_well: {
            const auto dv = [&obj](double x) { return obj.grad({x})[0]; };
            // 4x^3 - 4x + 0.3 has one root in each of these brackets
            stationary = {bisect(dv, -2.0, -0.5), bisect(dv, -0.5, 0.5), bisect(dv, 0.5, 2.0)};
            break;
        }
    }
    std::vector<double> values;
    for (double x : stationary) values.push_back(obj.eval({x}));
    std::sort(values.begin(), values.end());
    return values;
}

} // namespace surge
