#include <doctest.h>

#include "surge/series.hpp"
#include "surge/rng.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace surge;

namespace {

// independent quadrature oracle: composite Simpson, refined until stable
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double simpson_refined(const std::function<double(double)>& f, double a, double b, double tol) {
    int n = 64;
    double prev = simpson(f, a, b, n);
    for (int iter = 0; iter < 16; ++iter) {
        n *= 2;
        const double cur = simpson(f, a, b, n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

// Taylor re-expansion of P/Q through `order`
std::vector<double> reexpand(const PadeApproximant& pa, int order) {
    std::vector<double> c(static_cast<size_t>(order) + 1, 0.0);
    for (int k = 0; k <= order; ++k) {
        double acc = k < static_cast<int>(pa.num.size()) ? pa.num[static_cast<size_t>(k)] : 0.0;
        for (int j = 1; j <= std::min<int>(k, static_cast<int>(pa.den.size()) - 1); ++j)
            acc -= pa.den[static_cast<size_t>(j)] * c[static_cast<size_t>(k - j)];
        c[static_cast<size_t>(k)] = acc;
    }
    return c;
}

} // namespace

TEST_CASE("borel transform divides by factorials") {
    const BorelSeries b = borel_transform(PowerSeries{{1, 1, 2, 6, 24}});
    REQUIRE(b.coeffs.size() == 5);
    for (double v : b.coeffs) CHECK(v == 1.0);

    CHECK(borel_transform(PowerSeries{{3.5}}).coeffs == std::vector<double>{3.5});
    CHECK(borel_transform(PowerSeries{{0, 0, 0}}).coeffs == std::vector<double>{0, 0, 0});

    CHECK_THROWS_AS(borel_transform(PowerSeries{{}}), invalid_input_error);
    CHECK_THROWS_AS(borel_transform(PowerSeries{{1.0, std::nan("")}}), invalid_input_error);
}

TEST_CASE("borel round trip reproduces coefficients") {
    for (int trial = 0; trial < 20; ++trial) {
        PowerSeries s;
        for (int n = 0; n < 12; ++n)
            s.coeffs.push_back(20.0 * rng::uniform(99, trial, n) - 10.0);
        const BorelSeries b = borel_transform(s);
        double factorial = 1.0;
        for (size_t n = 0; n < s.coeffs.size(); ++n) {
            if (n > 0) factorial *= static_cast<double>(n);
            const double back = b.coeffs[n] * factorial;
            CHECK(std::abs(back - s.coeffs[n]) <= 1e-14 * std::max(1.0, std::abs(s.coeffs[n])));
        }
    }
}

TEST_CASE("ratio test on geometric tails") {
    {
        const auto r = ratio_test(BorelSeries{{1, 1, 1, 1, 1, 1}}, 3);
        REQUIRE(r.has_value());
        CHECK(r->radius == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_FALSE(r->oscillating);
    }
    {
        BorelSeries b;
        for (int n = 0; n <= 6; ++n) b.coeffs.push_back(std::pow(2.0, -n));
        const auto r = ratio_test(b, 3);
        REQUIRE(r.has_value());
        CHECK(r->radius == doctest::Approx(2.0).epsilon(1e-14));
        CHECK_FALSE(r->oscillating);
    }
    {
        BorelSeries b;
        for (int n = 0; n <= 6; ++n) b.coeffs.push_back(n % 2 ? -1.0 : 1.0);
        const auto r = ratio_test(b, 3);
        REQUIRE(r.has_value());
        CHECK(r->radius == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r->oscillating);
        // the alternating series really does sit on the negative axis: its
        // [0/1] approximant is 1/(1+z), pole at -1, so no positive pole
        CHECK(pade_poles(pade(b, 0, 1)).poles.empty());
    }
    CHECK_FALSE(ratio_test(BorelSeries{{1, 1}}, 3).has_value());
    {
        // trailing zeros are skipped; the nonzero run before them is used
        const auto r = ratio_test(BorelSeries{{1, 1, 1, 1, 0, 0}}, 3);
        REQUIRE(r.has_value());
        CHECK(r->radius == doctest::Approx(1.0));
    }
    CHECK_FALSE(ratio_test(BorelSeries{{1, 1, 1, 0, 1, 0}}, 3).has_value());
}

TEST_CASE("scan finds the divergence onset of the truncated geometric series") {
    BorelSeries b;
    b.coeffs.assign(8, 1.0);
    const auto found = scan_singularities(b, 2.0, 64, 10.0);

    // hand oracle: partial geometric sums on the same grid, same reporting rule
    std::vector<double> mags(64);
    for (int k = 0; k < 64; ++k) {
        const double z = 2.0 * (k + 1) / 64.0;
        double acc = 0.0, p = 1.0;
        for (int n = 0; n < 8; ++n) {
            acc += p;
            p *= z;
        }
        mags[static_cast<size_t>(k)] = acc;
    }
    int first_crossing = -1;
    for (int k = 0; k < 64 && first_crossing < 0; ++k)
        if (mags[static_cast<size_t>(k)] > 10.0) first_crossing = k;

    REQUIRE(found.size() == 1); // monotone partial sums: entry point only
    CHECK(found[0].location == doctest::Approx(2.0 * (first_crossing + 1) / 64.0));
    CHECK(found[0].location > 1.0);  // crossing sits just above the true pole at 1
    CHECK(found[0].location < 1.25);
    CHECK(found[0].detector == Detector::scan);

    CHECK(scan_singularities(BorelSeries{{1, 0, 0, 0}}, 2.0, 64, 10.0).empty());
    CHECK(scan_singularities(BorelSeries{{0, 0, 0, 0}}, 2.0, 64, 10.0).empty());
}

TEST_CASE("scan reports interior local maxima above threshold") {
    // two-pole structure: 1/((1-z/0.3)(1+...)) style bump built by hand
    BorelSeries b;
    for (int n = 0; n < 16; ++n)
        b.coeffs.push_back(std::pow(1.0 / 0.3, n) * std::cos(0.35 * n));
    const auto found = scan_singularities(b, 1.0, 256, 5.0);
    CHECK(found.size() >= 1);
    for (size_t i = 1; i < found.size(); ++i) CHECK(found[i].location > found[i - 1].location);
}

TEST_CASE("scan parallel matches serial bitwise") {
    BorelSeries b;
    for (int n = 0; n < 14; ++n) b.coeffs.push_back(std::pow(2.2, n) * (n % 3 == 0 ? -1.0 : 1.0));
    const auto par = scan_singularities(b, 1.5, 731, 25.0);
    const auto ser = scan_singularities_serial(b, 1.5, 731, 25.0);
    REQUIRE(par.size() == ser.size());
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].location == ser[i].location);
        CHECK(par[i].strength == ser[i].strength);
    }
}

TEST_CASE("pade tables for small series") {
    {
        const PadeApproximant pa = pade(BorelSeries{{1, 1, 1}}, 0, 1);
        CHECK(pa.num == std::vector<double>{1.0});
        REQUIRE(pa.den.size() == 2);
        CHECK(pa.den[0] == 1.0);
        CHECK(pa.den[1] == doctest::Approx(-1.0).epsilon(1e-14));
    }
    {
        const PadeApproximant pa = pade(BorelSeries{{1, 1, 0.5}}, 1, 1);
        CHECK(pa.num[0] == doctest::Approx(1.0));
        CHECK(pa.num[1] == doctest::Approx(0.5));
        CHECK(pa.den[1] == doctest::Approx(-0.5));
    }
    {
        const PadeApproximant pa = pade(BorelSeries{{2.5, 0, 0}}, 0, 1);
        CHECK(pa.num[0] == doctest::Approx(2.5));
        CHECK(pa.den[1] == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(pade(BorelSeries{{0, 0, 0}}, 0, 1), degenerate_pade_error);
    CHECK_THROWS_AS(pade(BorelSeries{{1, 1}}, 1, 1), invalid_input_error);
}

TEST_CASE("pade re-expansion reproduces the input coefficients") {
    for (int trial = 0; trial < 12; ++trial) {
        BorelSeries b;
        b.coeffs.push_back(1.0 + rng::uniform(7, trial, 0));
        for (int n = 1; n < 8; ++n)
            b.coeffs.push_back(2.0 * rng::uniform(7, trial, n) - 1.0);
        const int m = 3, n = 4;
        PadeApproximant pa;
        try {
            pa = pade(b, m, n);
        } catch (const degenerate_pade_error&) {
            continue; // random table can be degenerate; skip that draw
        }
        const auto back = reexpand(pa, m + n);
        for (int k = 0; k <= m + n; ++k)
            CHECK(std::abs(back[static_cast<size_t>(k)] - b.coeffs[static_cast<size_t>(k)]) <=
                  1e-10 * std::max(1.0, std::abs(b.coeffs[static_cast<size_t>(k)])));
    }
}

TEST_CASE("pade poles with residues") {
    {
        const PadePoles p = pade_poles(PadeApproximant{{1.0}, {1.0, -1.0}});
        REQUIRE(p.poles.size() == 1);
        CHECK(p.poles[0].location == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(*p.poles[0].residue == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(p.poles[0].detector == Detector::pade);
    }
    {
        // 1 - z^2/4 has roots at +-2; only the positive one is reported
        const PadePoles p = pade_poles(PadeApproximant{{1.0}, {1.0, 0.0, -0.25}});
        REQUIRE(p.poles.size() == 1);
        CHECK(p.poles[0].location == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("factorial series: ratio and pade agree with the closed form") {
    PowerSeries s;
    double factorial = 1.0;
    for (int n = 0; n <= 9; ++n) {
        if (n > 0) factorial *= n;
        s.coeffs.push_back(factorial);
    }
    const BorelSeries b = borel_transform(s);
    const auto r = ratio_test(b, 3);
    REQUIRE(r.has_value());
    CHECK(r->radius >= 0.99);
    CHECK(r->radius <= 1.01);
    const PadePoles p = pade_poles(pade(b, 0, 1));
    REQUIRE(p.poles.size() == 1);
    CHECK(std::abs(p.poles[0].location - 1.0) <= 1e-12);
}

TEST_CASE("laplace resummation of the constant approximant") {
    const PadeApproximant one{{1.0}, {1.0}};
    for (double g : {0.01, 0.1, 1.0}) {
        const double v = laplace_resum(one, g, 1e-10);
        CHECK(std::abs(v - 1.0) <= 1e-9);
    }
}

TEST_CASE("laplace resummation matches a brute-force quadrature") {
    // 1/(1+t): analytic on the positive axis, no excision involved
    const PadeApproximant pa{{1.0}, {1.0, 1.0}};
    const double g = 0.1;
    const double mine = laplace_resum(pa, g, 1e-12);
    const double upper = g * std::log(1e12);
    const double oracle =
        simpson_refined([g](double t) { return std::exp(-t / g) / (1.0 + t); }, 0.0, upper, 1e-12) /
        g;
    CHECK(std::abs(mine - oracle) <= 1e-6);
}

TEST_CASE("laplace principal value agrees with a pole-subtraction oracle") {
    // 1/(1-t): pole on the integration path at t = 1. The oracle splits off
    // the pole analytically:
    //   PV int e^{-t/g}/(1-t) = int [e^{-t/g} - e^{-1/g}]/(1-t) + e^{-1/g} PV int 1/(1-t)
    // where the first integrand is smooth and PV int_0^T dt/(1-t) = -log(T-1).
    const PadeApproximant pa{{1.0}, {1.0, -1.0}};
    const double g = 0.1;
    const double mine = laplace_resum(pa, g, 1e-12);
    const double upper = g * std::log(1e12);
    const double pole_weight = std::exp(-1.0 / g);
    const auto smooth = [g, pole_weight](double t) {
        const double d = 1.0 - t;
        if (std::abs(d) < 1e-9) return (1.0 / g) * pole_weight; // limit value
        return (std::exp(-t / g) - pole_weight) / d;
    };
    const double oracle =
        (simpson_refined(smooth, 0.0, upper, 1e-14) - pole_weight * std::log(upper - 1.0)) / g;
    CHECK(std::abs(mine - oracle) <= 1e-6 * std::abs(oracle));
}

TEST_CASE("target selection filters, merges and ranks") {
    {
        const std::vector<Singularity> cands = {{0.5, Detector::scan, 2.0, {}},
                                                {0.51, Detector::pade, 1.0, {}},
                                                {3.0, Detector::scan, 5.0, {}}};
        const TargetSet t = select_targets(cands, 2.0, 4);
        REQUIRE(t.targets.size() == 1);
        CHECK(t.targets[0] == doctest::Approx(0.5));
        CHECK(t.cutoff == 2.0);
    }
    CHECK(select_targets({}, 1.0, 4).targets.empty());
    {
        // equal strengths: larger location wins the truncation tie-break
        const std::vector<Singularity> cands = {{0.1, Detector::scan, 1.0, {}},
                                                {0.4, Detector::scan, 1.0, {}},
                                                {0.9, Detector::scan, 1.0, {}}};
        const TargetSet t = select_targets(cands, 1.0, 2);
        REQUIRE(t.targets.size() == 2);
        CHECK(t.targets[0] == doctest::Approx(0.4));
        CHECK(t.targets[1] == doctest::Approx(0.9));
    }
}

TEST_CASE("target selection invariants hold for random candidate sets") {
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Singularity> cands;
        const int count = 1 + static_cast<int>(rng::uniform(3, trial, 0) * 12);
        for (int i = 0; i < count; ++i)
            cands.push_back({4.0 * rng::uniform(3, trial, 10 + 2 * i),
                             Detector::scan,
                             rng::uniform(3, trial, 11 + 2 * i),
                             {}});
        const double cutoff = 0.5 + 2.0 * rng::uniform(3, trial, 99);
        const int max_targets = 3;
        const TargetSet t = select_targets(cands, cutoff, max_targets);
        CHECK(t.targets.size() <= static_cast<size_t>(max_targets));
        for (size_t i = 0; i < t.targets.size(); ++i) {
            CHECK(t.targets[i] > 0.0);
            CHECK(t.targets[i] < cutoff);
            if (i > 0) CHECK(t.targets[i] > t.targets[i - 1]);
        }
    }
}
