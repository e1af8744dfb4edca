// Scratch: locate criterion 8/9 failures.
#include "dce/numerics.hpp"
#include "dce/observables.hpp"
#include "dce/particles.hpp"
#include "dce/phase.hpp"
#include "test_util.hpp"

#include <cmath>
#include <cstdio>

using namespace dce;
using testutil::Rng;
using testutil::random_moebius;

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const double kL = M_PI;
    auto st = WallTrajectory::make_static(kL);

    // criterion 8 beta, per k
    for (int k : {2, 3}) {
        auto traj = WallTrajectory::make_lawwu(kL, 0.01 * kL, k, 10);
        const double T = traj.motion_duration();
        auto anz = build_lawwu(traj, T + kL);
        PhasePtr R = assemble_resonant(anz);
        const double t_eval = T + 2 * kL;
        double scale = 0, worst = 0;
        int wk = 0, wl = 0;
        std::vector<std::complex<double>> bd(64), br(64);
        for (int kk = 1; kk <= 8; ++kk)
            for (int ll = 1; ll <= 8; ++ll) {
                bd[(kk - 1) * 8 + ll - 1] = bogolubov_direct(*R, t_eval, kk, ll);
                br[(kk - 1) * 8 + ll - 1] = bogolubov_resonant(anz, kk, ll);
                scale = std::max({scale, std::abs(bd[(kk - 1) * 8 + ll - 1])});
            }
        for (int kk = 1; kk <= 8; ++kk)
            for (int ll = 1; ll <= 8; ++ll) {
                const auto d = bd[(kk - 1) * 8 + ll - 1], r = br[(kk - 1) * 8 + ll - 1];
                const double a = std::abs(d), b = std::abs(r);
                if (a < 1e-10 * scale && b < 1e-10 * scale) continue;
                const double rel = std::abs(d - r) / std::max(a, b);
                if (rel > worst) {
                    worst = rel;
                    wk = kk;
                    wl = ll;
                }
            }
        const auto d = bd[(wk - 1) * 8 + wl - 1], r = br[(wk - 1) * 8 + wl - 1];
        std::printf("k=%d worst rel %.3e at (%d,%d): direct (%.12e,%.12e) res (%.12e,%.12e)\n",
                    k, worst, wk, wl, d.real(), d.imag(), r.real(), r.imag());
    }

    // criterion 9, per system
    auto probe = [&](const char* name, const PhaseFunction& R,
                     const WallTrajectory& tr, int seed) {
        std::printf("%-28s residual %.3e\n", name,
                    max_moore_residual(R, tr, 1000, seed));
    };
    {
        auto t1 = WallTrajectory::make_sinusoidal(kL, 0.01 * kL, 1, 20);
        probe("grid sin k1", *solve_phase(t1, t1.motion_duration() + 4 * kL, 1e-10 * kL), t1, 101);
        auto t2 = WallTrajectory::make_sinusoidal(kL, 0.01 * kL, 2, 20);
        probe("grid sin k2", *solve_phase(t2, t2.motion_duration() + 4 * kL, 1e-10 * kL), t2, 102);
        auto t3 = WallTrajectory::make_lawwu(kL, 0.01 * kL, 2, 20);
        probe("grid lawwu k2", *solve_phase(t3, t3.motion_duration() + 4 * kL, 1e-10 * kL), t3, 103);
        Rng rng(5150);
        for (int i = 0; i < 5; ++i)
            probe("minimal", *minimal_phase(random_moebius(rng, 0.7), 1.0), st, 104 + i);
        auto t2b = WallTrajectory::make_sinusoidal(kL, 0.01 * kL, 2, 50);
        probe("asymptotic k2", *build_sinusoidal_asymptotic(t2b, t2b.motion_duration()), st, 110);
        auto t3b = WallTrajectory::make_lawwu(kL, 0.01 * kL, 3, 10);
        probe("lawwu exact k3",
              *assemble_resonant(build_lawwu(t3b, t3b.motion_duration() + kL)), st, 111);
        PhasePtr R = build_sinusoidal_asymptotic(t2b, t2b.motion_duration());
        probe("composed", *conformal_compose(R, random_moebius(rng, 0.6)), st, 112);
    }
    return 0;
}
