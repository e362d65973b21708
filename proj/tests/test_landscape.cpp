#include <doctest.h>

#include "surge/landscape.hpp"
#include "surge/io.hpp"
#include "surge/rng.hpp"

#include <cmath>
#include <vector>

using namespace surge;

namespace {

// central finite differences, step scaled to the coordinate
std::vector<double> fd_gradient(const ObjectiveFunction& obj, const std::vector<double>& theta) {
    std::vector<double> g(theta.size());
    for (size_t i = 0; i < theta.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(theta[i]));
        std::vector<double> lo = theta, hi = theta;
        lo[i] -= h;
        hi[i] += h;
        g[i] = (obj.eval(hi) - obj.eval(lo)) / (2.0 * h);
    }
    return g;
}

void check_gradient(const ObjectiveFunction& obj, std::uint64_t seed, int probes) {
    for (int p = 0; p < probes; ++p) {
        std::vector<double> theta(static_cast<size_t>(obj.dim));
        for (size_t i = 0; i < theta.size(); ++i)
            theta[i] = 2.0 * rng::uniform(seed, p, i) - 1.0;
        const auto ana = obj.grad(theta);
        const auto num = fd_gradient(obj, theta);
        double num_norm = 0.0, diff_norm = 0.0;
        for (size_t i = 0; i < theta.size(); ++i) {
            num_norm += num[i] * num[i];
            diff_norm += (ana[i] - num[i]) * (ana[i] - num[i]);
        }
        CHECK(std::sqrt(diff_norm) <= 1e-4 * std::max(1e-8, std::sqrt(num_norm)));
    }
}

} // namespace

TEST_CASE("synthetic dataset follows the target curve") {
    {
        const Dataset d = synthetic_1d_dataset(3, 0.0, 0.0, 42);
        for (double y : d.targets) CHECK(y == doctest::Approx(0.5)); // value at x = 0
    }
    {
        const double pi = 3.14159265358979323846;
        const Dataset d = synthetic_1d_dataset(1, pi, pi, 42);
        // 0.5 cos(5 pi) + 0.1 pi^2, worked by hand
        CHECK(d.targets[0] == doctest::Approx(-0.5 + 0.1 * pi * pi).epsilon(1e-12));
    }
    {
        const Dataset a = synthetic_1d_dataset(16, -2.0, 2.0, 7);
        const Dataset b = synthetic_1d_dataset(16, -2.0, 2.0, 7);
        CHECK(a.inputs == b.inputs);
        CHECK(a.targets == b.targets);
    }
}

TEST_CASE("mlp parameter count and determinism") {
    const MLP net({1, 12, 10, 8, 1});
    CHECK(net.parameter_count() == (12 + 120 + 80 + 8) + (12 + 10 + 8 + 1));
    const auto p1 = net.init_params(5);
    const auto p2 = net.init_params(5);
    CHECK(p1 == p2);
    CHECK(net.forward(p1, 0.3) == net.forward(p1, 0.3));
}

TEST_CASE("mse objective closed forms") {
    {
        // linear single-layer net can fit a linear target exactly
        const MLP net({1, 1});
        Dataset d;
        for (int k = 0; k < 5; ++k) {
            d.inputs.push_back(0.3 * k);
            d.targets.push_back(2.0 * 0.3 * k - 0.7);
        }
        const ObjectiveFunction obj = mse_objective(net, d);
        CHECK(obj.eval({2.0, -0.7}) == doctest::Approx(0.0).epsilon(1e-15));
    }
    {
        // single sample at x=0: output is the bias; L(b) = (b-1)^2 / 2
        const MLP net({1, 1});
        Dataset d;
        d.inputs = {0.0};
        d.targets = {1.0};
        const ObjectiveFunction obj = mse_objective(net, d);
        CHECK(obj.eval({0.0, 0.0}) == doctest::Approx(0.5));
        const auto g = obj.grad({0.0, 0.0});
        CHECK(g[0] == doctest::Approx(0.0));
        CHECK(g[1] == doctest::Approx(-1.0));
    }
}

TEST_CASE("mse backprop matches finite differences") {
    const MLP net({1, 6, 5, 1});
    const Dataset d = synthetic_1d_dataset(12, -2.0, 2.0, 3);
    check_gradient(mse_objective(net, d), 17, 10);
}

TEST_CASE("cross entropy closed forms and gradient") {
    const MLP net({1, 3});
    Dataset d;
    d.inputs = {0.5, -1.0, 2.0, 0.0};
    d.targets = {0, 2, 1, 0};
    const ObjectiveFunction obj = cross_entropy_objective(net, d);

    // zero weights and biases: uniform softmax over 3 classes
    const std::vector<double> zero(static_cast<size_t>(net.parameter_count()), 0.0);
    CHECK(obj.eval(zero) == doctest::Approx(4.0 * std::log(3.0)).epsilon(1e-12));

    // a 50-unit logit margin pushes the loss to the asymptote
    const MLP tiny({1, 2});
    Dataset one;
    one.inputs = {0.0};
    one.targets = {0};
    const ObjectiveFunction margin = cross_entropy_objective(tiny, one);
    CHECK(margin.eval({0.0, 0.0, 50.0, 0.0}) < 1e-20);

    check_gradient(obj, 23, 10);

    Dataset bad;
    bad.inputs = {0.1};
    bad.targets = {7};
    CHECK_THROWS_AS(cross_entropy_objective(net, bad), invalid_input_error);
}

TEST_CASE("analytic potentials and their critical values") {
    const ObjectiveFunction quartic = analytic_potential(PotentialKind::quartic);
    CHECK(quartic.eval({1.0}) == doctest::Approx(2.0));
    CHECK(quartic.grad({1.0})[0] == doctest::Approx(6.0));

    const ObjectiveFunction dw = analytic_potential(PotentialKind::double_well);
    for (double x : {-1.0, 1.0}) {
        CHECK(dw.eval({x}) == doctest::Approx(0.0));
        CHECK(dw.grad({x})[0] == doctest::Approx(0.0));
    }

    CHECK(critical_values(PotentialKind::quadratic) == std::vector<double>{0.0});
    {
        const auto v = critical_values(PotentialKind::double_well);
        REQUIRE(v.size() == 3); // two minima at 0 plus the hump at 1
        CHECK(v[0] == doctest::Approx(0.0));
        CHECK(v[1] == doctest::Approx(0.0));
        CHECK(v[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("tilted double well critical values against a root-finder oracle") {
    const ObjectiveFunction obj = analytic_potential(PotentialKind::tilted_double_well);
    // independent oracle: dense sign-change sweep of the cubic 4x^3 - 4x + 0.3
    const auto dv = [](double x) { return 4.0 * x * x * x - 4.0 * x + 0.3; };
    std::vector<double> roots;
    double prev_x = -3.0, prev_f = dv(prev_x);
    for (int i = 1; i <= 60000; ++i) {
        const double x = -3.0 + 6.0 * i / 60000.0;
        const double f = dv(x);
        if ((prev_f < 0.0) != (f < 0.0)) {
            double lo = prev_x, hi = x;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((dv(lo) < 0.0) != (dv(mid) < 0.0) ? hi : lo) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    REQUIRE(roots.size() == 3);
    std::vector<double> oracle;
    for (double r : roots) oracle.push_back(obj.eval({r}));
    std::sort(oracle.begin(), oracle.end());

    const auto mine = critical_values(PotentialKind::tilted_double_well);
    REQUIRE(mine.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(mine[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    for (double v : mine) CHECK(v > 0.0); // offset keeps every critical value positive
}

TEST_CASE("critical points have vanishing gradient") {
    for (auto kind : {PotentialKind::quadratic, PotentialKind::double_well,
                      PotentialKind::tilted_double_well, PotentialKind::quartic}) {
        const ObjectiveFunction obj = analytic_potential(kind);
        // reconstruct the stationary points by scanning the gradient
        for (double x = -2.0; x <= 2.0; x += 1e-4) {
            const double g0 = obj.grad({x})[0];
            const double g1 = obj.grad({x + 1e-4})[0];
            if ((g0 < 0.0) != (g1 < 0.0)) {
                double lo = x, hi = x + 1e-4;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((obj.grad({lo})[0] < 0.0) != (obj.grad({mid})[0] < 0.0) ? hi : lo) = mid;
                }
                CHECK(std::abs(obj.grad({0.5 * (lo + hi)})[0]) < 1e-10);
            }
        }
    }
}

TEST_CASE("potential gradients match finite differences") {
    for (auto kind : {PotentialKind::quadratic, PotentialKind::quartic, PotentialKind::double_well,
                      PotentialKind::tilted_double_well})
        check_gradient(analytic_potential(kind), 31, 10);
    check_gradient(isotropic_quadratic(3), 37, 10);
}

TEST_CASE("dataset csv and parameter blob round trips") {
    const Dataset d = synthetic_1d_dataset(9, -1.0, 1.0, 11);
    const Dataset back = dataset_from_csv(dataset_to_csv(d));
    REQUIRE(back.size() == d.size());
    for (size_t k = 0; k < d.size(); ++k) {
        CHECK(back.inputs[k] == d.inputs[k]);
        CHECK(back.targets[k] == d.targets[k]);
    }

    const MLP net({1, 4, 1});
    const auto params = net.init_params(3);
    const auto [sizes, restored] = params_from_blob(params_to_blob(net.layer_sizes(), params));
    CHECK(sizes == net.layer_sizes());
    CHECK(restored == params);
}
