// Timing comparison of the OpenMP kernels against the serial reference
// implementations, on the spectra sizes the solver actually uses.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include <omp.h>

#include "branchflow/field.hpp"
#include "branchflow/kernels.hpp"

namespace bf = branchflow;

namespace {

double seconds_per_call(const std::function<void()>& fn, int reps) {
    fn();  // warm up (plan caches, page faults)
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double t_omp, double t_ref) {
    std::printf("%-28s omp %10.3f ms   ref %10.3f ms   speedup %5.2fx\n", name, 1e3 * t_omp,
                1e3 * t_ref, t_ref / t_omp);
}

}  // namespace

int main(int argc, char** argv) {
    const int N = (argc > 1) ? std::atoi(argv[1]) : 64;
    const int reps = (argc > 2) ? std::atoi(argv[2]) : 10;
    const bf::GridSpec g = bf::make_grid(3, N, 8.0);
    std::printf("grid N=%d (%zu modes), %d reps, %d threads\n", N, g.size(), reps,
                omp_get_max_threads());

    std::vector<bf::Spectrum> v(3);
    for (int i = 0; i < 3; ++i) {
        bf::ScalarField f = bf::sample_function(g, [i](const std::array<double, 3>& x) {
            return std::sin(0.5 * x[0] + 0.3 * x[1]) * std::cos(0.4 * x[2] + 0.1 * i);
        });
        v[i] = bf::to_spectral(f);
    }

    {
        auto a = v, b = v;
        const double t_omp =
            seconds_per_call([&] { bf::apply_heat_multiplier(g, 0.05, 0.01, a[0]); }, reps);
        const double t_ref =
            seconds_per_call([&] { bf::ref::apply_heat_multiplier(g, 0.05, 0.01, b[0]); }, reps);
        report("heat multiplier", t_omp, t_ref);
    }
    {
        auto a = v, b = v;
        const double t_omp = seconds_per_call([&] { bf::leray_project_spectra(g, a); }, reps);
        const double t_ref = seconds_per_call([&] { bf::ref::leray_project_spectra(g, b); }, reps);
        report("Leray projection", t_omp, t_ref);
    }
    {
        bf::DuhamelAccumulator acc(g, 0.05, 0.01, 3);
        const double t_omp = seconds_per_call([&] { acc.advance(v, v); }, reps);
        std::vector<bf::Spectrum> state(3, bf::Spectrum(g.size(), 0.0));
        const double t_ref = seconds_per_call(
            [&] { bf::ref::duhamel_step(g, 0.05, 0.01, state, v, v); }, reps);
        report("Duhamel step", t_omp, t_ref);
    }
    return 0;
}
