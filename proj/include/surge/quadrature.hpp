#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace surge {

struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1] (abscissa, gauss w, kronrod w)
inline constexpr double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class Fn>
double gk15_panel(const Fn& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = gk15[0][1] * f0;
    double k15 = gk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * gk15[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g7 += gk15[i][1] * fi;
        k15 += gk15[i][2] * fi;
    }
    g7 *= h;
    k15 *= h;
    err = std::abs(g7 - k15);
    err = 200.0 * err * std::sqrt(err);
    return k15;
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a,b] to absolute tolerance.
// Throws quadrature_error when the interval stack is exhausted before the
// tolerance is met.
template <class Fn>
double integrate_adaptive(const Fn& f, double a, double b, double abs_tol,
                          int max_intervals = 4000) {
    if (!(a < b)) return 0.0;
    struct seg {
        double a, b, tol;
    };
    std::vector<seg> stack;
    stack.push_back({a, b, abs_tol});
    double sum = 0.0;
    int used = 1;
    while (!stack.empty()) {
        const seg s = stack.back();
        stack.pop_back();
        double err = 0.0;
        const double v = detail::gk15_panel(f, s.a, s.b, err);
        if (err <= s.tol || (s.b - s.a) < 1e-15 * (std::abs(s.a) + 1.0)) {
            sum += v;
            continue;
        }
        if (used + 2 > max_intervals)
            throw quadrature_error("adaptive quadrature: interval budget exhausted");
        const double mid = 0.5 * (s.a + s.b);
        stack.push_back({s.a, mid, 0.5 * s.tol});
        stack.push_back({mid, s.b, 0.5 * s.tol});
        used += 2;
    }
    return sum;
}

} // namespace surge
