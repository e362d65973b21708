// Timing comparison of the OpenMP kernels against their serial reference:
// coupling-grid estimation, single-g Monte Carlo, and the Borel-plane scan.

#include "surge/landscape.hpp"
#include "surge/parallel.hpp"
#include "surge/partition.hpp"
#include "surge/series.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class Fn>
double time_ms(const Fn& fn, int reps) {
    fn(); // warm up
    const double t0 = now_ms();
    for (int r = 0; r < reps; ++r) fn();
    return (now_ms() - t0) / reps;
}

} // namespace

int main(int argc, char** argv) {
    int samples = 200000;
    int reps = 3;
    if (argc > 1) samples = std::stoi(argv[1]);
    if (argc > 2) reps = std::stoi(argv[2]);

#ifdef _OPENMP
    std::printf("threads available: %d (SURGE_THREADS cap: %d)\n", omp_get_max_threads(),
                surge::max_threads());
#else
    std::printf("built without OpenMP\n");
#endif

    const surge::ObjectiveFunction well =
        surge::analytic_potential(surge::PotentialKind::tilted_double_well);
    const std::vector<double> theta0 = {1.2};
    const surge::Proposal prop = surge::Proposal::gaussian(theta0, 1.0);

    // single-g Monte Carlo
    {
        const auto par = [&] { (void)surge::mc_partition(well, prop, 0.3, samples, 7); };
        const auto ser = [&] { (void)surge::mc_partition_serial(well, prop, 0.3, samples, 7); };
        const double tp = time_ms(par, reps);
        const double ts = time_ms(ser, reps);
        const double zp = surge::mc_partition(well, prop, 0.3, samples, 7).z;
        const double zs = surge::mc_partition_serial(well, prop, 0.3, samples, 7).z;
        std::printf("mc_partition      n=%d: parallel %8.2f ms  serial %8.2f ms  speedup %.2fx  %s\n",
                    samples, tp, ts, ts / tp, zp == zs ? "bitwise equal" : "MISMATCH");
    }

    // coupling grid
    {
        surge::AnalysisConfig config;
        config.samples_per_g = samples / 10;
        config.proposal_width = 1.0;
        const auto par = [&] { (void)surge::estimate_grid(well, theta0, 0.015, 1.5, config); };
        const auto ser = [&] { (void)surge::estimate_grid_serial(well, theta0, 0.015, 1.5, config); };
        const double tp = time_ms(par, reps);
        const double ts = time_ms(ser, reps);
        const auto gp = surge::estimate_grid(well, theta0, 0.015, 1.5, config);
        const auto gs = surge::estimate_grid_serial(well, theta0, 0.015, 1.5, config);
        bool equal = gp.size() == gs.size();
        for (size_t i = 0; equal && i < gp.size(); ++i)
            equal = gp[i].z == gs[i].z && gp[i].stderr_ == gs[i].stderr_;
        std::printf("estimate_grid   S=%d,N=%d: parallel %8.2f ms  serial %8.2f ms  speedup %.2fx  %s\n",
                    config.grid_size, config.samples_per_g, tp, ts, ts / tp,
                    equal ? "bitwise equal" : "MISMATCH");
    }

    // Borel-plane scan on a long synthetic series
    {
        surge::BorelSeries borel;
        borel.coeffs.resize(48);
        for (size_t n = 0; n < borel.coeffs.size(); ++n)
            borel.coeffs[n] = std::pow(1.8, static_cast<double>(n)) * ((n % 2 == 0) ? 1.0 : 0.97);
        const int points = samples;
        const auto par = [&] { (void)surge::scan_singularities(borel, 1.0, points, 50.0); };
        const auto ser = [&] { (void)surge::scan_singularities_serial(borel, 1.0, points, 50.0); };
        const double tp = time_ms(par, reps);
        const double ts = time_ms(ser, reps);
        const auto rp = surge::scan_singularities(borel, 1.0, points, 50.0);
        const auto rs = surge::scan_singularities_serial(borel, 1.0, points, 50.0);
        bool equal = rp.size() == rs.size();
        for (size_t i = 0; equal && i < rp.size(); ++i)
            equal = rp[i].location == rs[i].location && rp[i].strength == rs[i].strength;
        std::printf("scan_singularities K=%d: parallel %8.2f ms  serial %8.2f ms  speedup %.2fx  %s\n",
                    points, tp, ts, ts / tp, equal ? "bitwise equal" : "MISMATCH");
    }
    return 0;
}
