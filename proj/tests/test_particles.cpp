#include "dce/errors.hpp"
#include "dce/particles.hpp"
#include "dce/phase.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace dce;
using testutil::Rng;
using testutil::random_moebius;

TEST_CASE("static cavity: beta vanishes, alpha is the identity") {
    auto id = identity_phase(M_PI);
    for (int k : {1, 2, 5})
        for (int l : {1, 3, 4}) {
            CHECK(std::abs(bogolubov_direct(*id, 9.0, k, l)) < 1e-12);
            const double want = (k == l) ? 1.0 : 0.0;
            CHECK(std::abs(alpha_direct(*id, 9.0, k, l) - want) < 1e-12);
        }
    auto spec = spectrum(*id, 9.0, 8, 1e-6);
    CHECK(spec.N_total <= 1e-12);
}

TEST_CASE("minimal solutions produce no photons") {
    Rng rng(14);
    for (int i = 0; i < 10; ++i) {
        auto R = minimal_phase(random_moebius(rng, 0.7), 1.0);
        for (int k : {1, 2, 4})
            for (int l : {1, 2, 5})
                CHECK(std::abs(bogolubov_direct(*R, 7.0, k, l)) < 1e-10);
    }
}

TEST_CASE("bogolubov unitarity sum per mode") {
    const double L = M_PI;
    SUBCASE("minimal solution") {
        Rng rng(3);
        auto R = minimal_phase(random_moebius(rng, 0.6), 1.0);
        auto tbl = build_node_table(*R, 8.0, 48, 48);
        auto a = alpha_matrix(tbl, 48, 48, ExecutionPolicy::Parallel);
        auto b = bogolubov_matrix(tbl, 48, 48, ExecutionPolicy::Parallel);
        for (int k : {1, 2, 3, 6}) {
            double s = 0.0;
            for (int l = 1; l <= 48; ++l) {
                s += std::norm(a[(k - 1) * 48 + (l - 1)]);
                s -= std::norm(b[(k - 1) * 48 + (l - 1)]);
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
    SUBCASE("driven k=2 cavity") {
        auto traj = WallTrajectory::make_sinusoidal(L, 0.01 * L, 2, 50);
        auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
        const double t = traj.motion_duration() + 2 * L;
        const int n = 256; // converged truncation for the 1e-6 check
        auto tbl = build_node_table(*R, t, 3, n);
        auto a = alpha_matrix(tbl, 3, n, ExecutionPolicy::Parallel);
        auto b = bogolubov_matrix(tbl, 3, n, ExecutionPolicy::Parallel);
        for (int k : {1, 2, 3}) {
            double s = 0.0;
            for (int l = 1; l <= n; ++l) {
                s += std::norm(a[(k - 1) * n + (l - 1)]);
                s -= std::norm(b[(k - 1) * n + (l - 1)]);
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("window shifts past T_motion do not change the coefficients") {
    const double L = M_PI;
    auto traj = WallTrajectory::make_sinusoidal(L, 0.01 * L, 2, 10);
    const double T = traj.motion_duration();
    auto R = solve_phase(traj, T + 8 * L, 1e-10 * L);
    for (double delta : {2.0 * L, 0.73 * L, 3.1 * L}) {
        for (int k : {1, 3})
            for (int l : {1, 2}) {
                auto b1 = bogolubov_direct(*R, T + L, k, l);
                auto b2 = bogolubov_direct(*R, T + L + delta, k, l);
                CHECK(std::abs(b1 - b2) < 1e-9);
            }
    }
}

TEST_CASE("fundamental drive produces no photons (asymptotic solution)") {
    auto traj = WallTrajectory::make_sinusoidal(M_PI, 0.01 * M_PI, 1, 50);
    auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
    auto spec = spectrum(*R, traj.motion_duration() + 2 * M_PI, 16, 1e-6);
    CHECK(spec.N_total <= 1e-10);
}

TEST_CASE("resonant beta: identity and fundamental-frequency nulls") {
    const double L = M_PI;
    ResonantAnsatz id1{1, L, {SigmaFunction(MoebiusElement())}};
    for (int k : {1, 2})
        for (int l : {1, 2, 3})
            CHECK(std::abs(bogolubov_resonant(id1, k, l)) < 1e-12);

    Rng rng(9);
    for (int i = 0; i < 6; ++i) {
        ResonantAnsatz a{1, L, {SigmaFunction(random_moebius(rng, 0.7))}};
        for (int k : {1, 2})
            for (int l : {1, 3})
                CHECK(std::abs(bogolubov_resonant(a, k, l)) < 1e-10);
    }
}

TEST_CASE("resonant beta agrees with the direct window integral") {
    const double L = M_PI;
    auto traj = WallTrajectory::make_lawwu(L, 0.01 * L, 2, 10);
    auto a = build_lawwu(traj, traj.motion_duration() + L);
    auto R = assemble_resonant(a);
    const double t = traj.motion_duration() + 2 * L;
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l) {
            auto bd = bogolubov_direct(*R, t, k, l);
            auto br = bogolubov_resonant(a, k, l);
            CHECK(std::abs(bd - br) < 1e-8);
        }
}

TEST_CASE("k=2 resonance populates only parity-allowed modes") {
    auto traj = WallTrajectory::make_sinusoidal(M_PI, 0.01 * M_PI, 2, 50);
    auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
    auto nk = photon_numbers(*R, traj.motion_duration() + 2 * M_PI, 8, 1e-8);
    CHECK(nk[0] > 1e-2);       // n_1 strongly pumped
    CHECK(nk[1] < 1e-12);      // n_2 empty
    CHECK(nk[2] > 1e-3);       // n_3 pumped
    CHECK(nk[3] < 1e-12);      // n_4 empty
    for (double v : nk) CHECK(v >= 0.0);
}

TEST_CASE("spectrum doubles l_max until the tail settles") {
    auto traj = WallTrajectory::make_sinusoidal(M_PI, 0.01 * M_PI, 2, 50);
    auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
    auto spec = spectrum(*R, traj.motion_duration() + 2 * M_PI, 16, 1e-4,
                         ExecutionPolicy::Parallel, 256);
    CHECK(spec.l_max > 16);
    CHECK(!spec.truncated);
    CHECK(spec.tail_estimate < 1e-4 * spec.N_total);
    // Cap reached -> truncation flag, not an exception.
    auto spec2 = spectrum(*R, traj.motion_duration() + 2 * M_PI, 16, 1e-13,
                          ExecutionPolicy::Parallel, 32);
    CHECK(spec2.truncated);
}

TEST_CASE("matrix entries match the single-coefficient routine") {
    auto traj = WallTrajectory::make_sinusoidal(M_PI, 0.01 * M_PI, 2, 20);
    auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
    const double t = traj.motion_duration() + 2 * M_PI;
    auto tbl = build_node_table(*R, t, 8, 8);
    auto mat = bogolubov_matrix(tbl, 8, 8, ExecutionPolicy::Serial);
    for (int k : {1, 2, 5})
        for (int l : {1, 4, 8}) {
            auto direct = bogolubov_direct(*R, t, k, l);
            CHECK(std::abs(mat[(k - 1) * 8 + (l - 1)] - direct) < 1e-10);
        }
}

TEST_CASE("sum rule closes for static, minimal and driven systems") {
    const double L = M_PI;
    auto st = WallTrajectory::make_static(L);
    SUBCASE("static: exact") {
        auto id = identity_phase(L);
        auto spec = spectrum(*id, 7.0, 8, 1e-6);
        auto rep = total_energy(*id, st, 7.0);
        auto chk = sum_rule_check(spec, rep);
        CHECK(chk.rel_err < 1e-10);
    }
    SUBCASE("minimal") {
        Rng rng(70);
        auto R = minimal_phase(random_moebius(rng, 0.6), 1.0);
        auto spec = spectrum(*R, 7.0, 8, 1e-6);
        auto rep = total_energy(*R, st, 7.0);
        auto chk = sum_rule_check(spec, rep);
        CHECK(chk.rel_err < 1e-8);
    }
    SUBCASE("driven k=2") {
        auto traj = WallTrajectory::make_sinusoidal(L, 0.01 * L, 2, 50);
        auto R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
        const double t = traj.motion_duration() + 2 * L;
        auto spec = spectrum(*R, t, 32, 1e-5, ExecutionPolicy::Parallel, 256);
        auto rep = total_energy(*R, st, t);
        auto chk = sum_rule_check(spec, rep);
        CHECK(chk.rel_err < 1e-3);
    }
}

TEST_CASE("photon spectra are invariant under the SL(2,R) action") {
    const double L = M_PI;
    auto traj = WallTrajectory::make_sinusoidal(L, 0.01 * L, 2, 50);
    PhasePtr R = build_sinusoidal_asymptotic(traj, traj.motion_duration());
    const double t = traj.motion_duration() + 2 * L;
    auto nk = photon_numbers(*R, t, 8, 1e-9);
    Rng rng(81);
    for (int i = 0; i < 3; ++i) {
        auto comp = conformal_compose(R, random_moebius(rng, 0.6));
        auto nk2 = photon_numbers(*comp, t, 8, 1e-9);
        for (int k = 0; k < 8; ++k) {
            const double rel = std::abs(nk[k] - nk2[k])
                               / std::max({nk[k], nk2[k], 1e-12});
            CHECK(rel < 1e-7);
        }
    }
}

TEST_CASE("mode index validation") {
    auto id = identity_phase(M_PI);
    CHECK_THROWS_AS(bogolubov_direct(*id, 5.0, 0, 1), parameter_error);
    CHECK_THROWS_AS(alpha_direct(*id, 5.0, 1, -2), parameter_error);
    ResonantAnsatz a{1, M_PI, {SigmaFunction(MoebiusElement())}};
    CHECK_THROWS_AS(bogolubov_resonant(a, 0, 1), parameter_error);
}
