// Times the data-parallel kernels against their serial references.
// Build: cmake --build build --target dce_bench ; run: ./build/bench/dce_bench
#include "dce/observables.hpp"
#include "dce/particles.hpp"
#include "dce/phase.hpp"

#ifdef DCE_HAVE_OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

using namespace dce;
using clk = std::chrono::steady_clock;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = clk::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(clk::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel);
}

} // namespace

int main() {
#ifdef DCE_HAVE_OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; Parallel falls back to Serial\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    auto traj = WallTrajectory::make_sinusoidal(M_PI, 0.01 * M_PI, 2, 50);
    const double T = traj.motion_duration();
    auto Ra = build_sinusoidal_asymptotic(traj, T);
    auto Rg = solve_phase(traj, T + 2 * M_PI, 1e-10 * M_PI);
    const double t = T + M_PI;

    {
        auto serial = time_best_of(3, [&] {
            (void)build_node_table(*Rg, t, 64, 64, ExecutionPolicy::Serial);
        });
        auto par = time_best_of(3, [&] {
            (void)build_node_table(*Rg, t, 64, 64, ExecutionPolicy::Parallel);
        });
        row("node table (grid phase)", serial, par);
    }
    {
        auto tbl = build_node_table(*Ra, t, 128, 128, ExecutionPolicy::Parallel);
        auto serial = time_best_of(3, [&] {
            (void)bogolubov_matrix(tbl, 128, 128, ExecutionPolicy::Serial);
        });
        auto par = time_best_of(3, [&] {
            (void)bogolubov_matrix(tbl, 128, 128, ExecutionPolicy::Parallel);
        });
        row("beta matrix 128x128", serial, par);
    }
    {
        auto serial = time_best_of(3, [&] {
            (void)energy_profile(*Rg, T - M_PI, T + M_PI, 8192, 16,
                                 ExecutionPolicy::Serial);
        });
        auto par = time_best_of(3, [&] {
            (void)energy_profile(*Rg, T - M_PI, T + M_PI, 8192, 16,
                                 ExecutionPolicy::Parallel);
        });
        row("profile 8192 samples", serial, par);
    }
    {
        auto serial = time_best_of(2, [&] {
            (void)photon_numbers(*Ra, t, 16, 1e-8, ExecutionPolicy::Serial);
        });
        auto par = time_best_of(2, [&] {
            (void)photon_numbers(*Ra, t, 16, 1e-8, ExecutionPolicy::Parallel);
        });
        row("photon numbers k<=16", serial, par);
    }
    return 0;
}
