#pragma once

#include <vector>

namespace surge {

struct PolyRoots {
    std::vector<double> real_roots; // roots with negligible imaginary part, ascending
    bool converged = true;          // false when the eigensolver gave up
};

// Real roots of p(x) = c[0] + c[1] x + ... + c[n] x^n via the companion
// matrix. Trailing (near-)zero leading coefficients are stripped first.
PolyRoots real_polynomial_roots(const std::vector<double>& coeffs);

} // namespace surge
