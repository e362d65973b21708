#pragma once

#include "surge/series.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace surge {

// A differentiable objective over R^dim. eval and grad must be pure and
// reentrant; they may be called concurrently from the estimator kernels.
struct ObjectiveFunction {
    int dim = 0;
    std::function<double(const std::vector<double>&)> eval;
    std::function<std::vector<double>(const std::vector<double>&)> grad;
};

struct Dataset {
    std::vector<double> inputs;
    std::vector<double> targets; // regression values or class indices
    size_t size() const { return inputs.size(); }
};

// Fully connected tanh network with a linear output layer. Parameters live in
// a flat vector (weights layer by layer, row-major, then biases layer by layer).
class MLP {
  public:
    explicit MLP(std::vector<int> layer_sizes);

    int parameter_count() const { return param_count_; }
    const std::vector<int>& layer_sizes() const { return sizes_; }

    std::vector<double> init_params(std::uint64_t seed) const;

    // forward pass for a single scalar input (first layer width 1)
    std::vector<double> forward(const std::vector<double>& params, double x) const;

    // accumulates d(loss)/d(params) given d(loss)/d(output) for one sample
    void backward(const std::vector<double>& params, double x,
                  const std::vector<double>& output_grad, std::vector<double>& param_grad) const;

  private:
    std::vector<int> sizes_;
    int param_count_ = 0;
};

Dataset synthetic_1d_dataset(int n_points, double x_lo, double x_hi, std::uint64_t seed);

// L = 1/(2K) sum |f(x_k) - y_k|^2, gradient by backprop
ObjectiveFunction mse_objective(const MLP& model, const Dataset& data);

// L = -sum log softmax(f(x_i))[y_i]; targets hold class indices
ObjectiveFunction cross_entropy_objective(const MLP& model, const Dataset& data);

enum class PotentialKind { quadratic, quartic, double_well, tilted_double_well };

PotentialKind potential_from_name(const std::string& name);

// 1-d analytic objectives with closed-form gradients:
//   quadratic          x^2 / 2
//   quartic            x^2 + x^4
//   double_well        (x^2 - 1)^2
//   tilted_double_well (x^2 - 1)^2 + 0.3 x + 1
ObjectiveFunction analytic_potential(PotentialKind kind);

// d-dimensional |theta|^2 / 2
ObjectiveFunction isotropic_quadratic(int dim);

// constant objective L = c everywhere (no divergence structure at all)
ObjectiveFunction constant_objective(int dim, double value);

// All values L(x*) with L'(x*) = 0, ascending; closed form or bracketed
// bisection on the gradient.
std::vector<double> critical_values(PotentialKind kind);

} // namespace surge
