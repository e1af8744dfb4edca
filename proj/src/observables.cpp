#include "dce/observables.hpp"
#include "dce/errors.hpp"
#include "dce/numerics.hpp"

#ifdef DCE_HAVE_OPENMP
#include <omp.h>
#endif

#include <cmath>

namespace dce {

namespace {

double default_quad_tol(double L) { return 1e-10 * M_PI / L; }

void require_window(const PhaseFunction& R, double lo, double hi) {
    const auto d = R.domain();
    const double slack = 1e-9 * R.fundamental_length();
    if (lo < d.first - slack || hi > d.second + slack)
        throw domain_error("observables: window [" + std::to_string(lo) + ", "
                           + std::to_string(hi) + "] outside phase domain");
}

} // namespace

double schwarzian(const PhaseFunction& R, double tau) {
    const PhaseJet j = R.jet(tau);
    if (!(j[1] > 0.0))
        throw monotonicity_error("schwarzian: R' <= 0 at tau=" + std::to_string(tau));
    const double r = j[2] / j[1];
    return j[3] / j[1] - 1.5 * r * r;
}

double profile_rho(const PhaseFunction& R, double tau) {
    const double L = R.fundamental_length();
    const PhaseJet j = R.jet(tau);
    if (!(j[1] > 0.0))
        throw monotonicity_error("profile: R' <= 0 at tau=" + std::to_string(tau));
    const double r = j[2] / j[1];
    const double S = j[3] / j[1] - 1.5 * r * r;
    return -M_PI / (48.0 * L * L) * j[1] * j[1] - S / (24.0 * M_PI);
}

double energy_density(const PhaseFunction& R, double x, double t) {
    return profile_rho(R, t + x) + profile_rho(R, t - x);
}

EnergyProfile energy_profile(const PhaseFunction& R, double tau_lo, double tau_hi,
                             int n_samples, int k_max, ExecutionPolicy policy) {
    if (!(tau_hi > tau_lo))
        throw parameter_error("energy_profile: empty range");
    require_window(R, tau_lo, tau_hi);
    const double L = R.fundamental_length();
    const double fastest = 2.0 * L / std::max(1, k_max);
    const int needed = static_cast<int>(std::ceil(32.0 * (tau_hi - tau_lo) / fastest));
    if (n_samples < std::max(2, needed))
        throw parameter_error("energy_profile: " + std::to_string(n_samples)
                              + " samples cannot resolve 2L/k_max; need >= "
                              + std::to_string(std::max(2, needed)));

    EnergyProfile out;
    out.L = L;
    out.period_start = std::max(tau_lo, R.periodic_start());
    out.tau.resize(n_samples);
    out.rho.resize(n_samples);
    const double h = (tau_hi - tau_lo) / (n_samples - 1);
    if (policy == ExecutionPolicy::Parallel) {
#ifdef DCE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n_samples; ++i) {
            out.tau[i] = tau_lo + h * i;
            out.rho[i] = profile_rho(R, out.tau[i]);
        }
    } else {
        for (int i = 0; i < n_samples; ++i) {
            out.tau[i] = tau_lo + h * i;
            out.rho[i] = profile_rho(R, out.tau[i]);
        }
    }
    return out;
}

EnergyReport total_energy(const PhaseFunction& R, const WallTrajectory& traj,
                          double t, double quad_tol) {
    const double L = traj.length();
    const double Lt = traj.eval(t, 0);
    require_window(R, t - Lt, t + Lt);
    if (quad_tol <= 0.0) quad_tol = default_quad_tol(L);

    const double c_sub = -M_PI / (48.0 * L * L);
    auto f_sub = [&](double tau) {
        const double r1 = R.jet(tau)[1];
        return c_sub * r1 * r1;
    };
    auto f_schw = [&](double tau) { return -schwarzian(R, tau) / (24.0 * M_PI); };

    const auto bps = R.breakpoints_in(t - Lt, t + Lt);
    auto [e_sub, e_schw] = num::integrate_adaptive_pair(f_sub, f_schw, t - Lt,
                                                        t + Lt, quad_tol, bps);
    EnergyReport rep;
    rep.E_subcasimir = e_sub;
    rep.E_schwarzian = e_schw;
    rep.E_total = e_sub + e_schw;
    rep.t_eval = t;
    return rep;
}

SubCasimirCheck subcasimir_bound_check(const PhaseFunction& R,
                                       const WallTrajectory& traj, double t,
                                       double quad_tol) {
    const double L = traj.length();
    const double Lt = traj.eval(t, 0);
    require_window(R, t - Lt, t + Lt);
    if (quad_tol <= 0.0) quad_tol = default_quad_tol(L);

    const double c_sub = -M_PI / (48.0 * L * L);
    auto f_sub = [&](double tau) {
        const double r1 = R.jet(tau)[1];
        return c_sub * r1 * r1;
    };
    SubCasimirCheck chk;
    chk.lhs = num::integrate_adaptive(f_sub, t - Lt, t + Lt, quad_tol,
                                      R.breakpoints_in(t - Lt, t + Lt));
    chk.rhs = -M_PI / (24.0 * Lt);
    chk.holds = chk.lhs <= chk.rhs + 64.0 * quad_tol + 1e-12;
    return chk;
}

TEnergyResult energy_via_T(const PhasePtr& R, const WallTrajectory& traj,
                           double t, double quad_tol) {
    if (!R) throw parameter_error("energy_via_T: null phase");
    const double L = traj.length();
    require_window(*R, t - L, t + L);
    if (quad_tol <= 0.0) quad_tol = default_quad_tol(L);
    const double omega = M_PI / L;

    PhasePtr rinv = invert_phase(R);

    // Window [t'-L, t'+L] = [R(t-L), R(t+L)] up to the Moore residual.
    const double lo = R->value(t - L);
    const double hi = R->value(t + L);

    auto f_energy = [&](double u) {
        const PhaseJet g = rinv->jet(u); // g[1] = dR^{-1}/du = 1/T^2
        const double T2 = 1.0 / g[1];
        // T = g1^{-1/2}  =>  dT/du = -(1/2) g1^{-3/2} g2.
        const double Td = -0.5 * g[2] / (g[1] * std::sqrt(g[1]));
        return (Td * Td - 0.25 * omega * omega * T2) / (12.0 * M_PI);
    };
    auto f_constraint = [&](double u) { return rinv->jet(u)[1] / (2.0 * L); };

    const auto bps = rinv->breakpoints_in(lo, hi);
    auto [e, c] = num::integrate_adaptive_pair(f_energy, f_constraint, lo, hi,
                                               quad_tol, bps);
    return {e, c};
}

double resonant_energy(const ResonantAnsatz& ansatz, double quad_tol) {
    if (ansatz.k < 1 || ansatz.sigmas.size() != static_cast<size_t>(ansatz.k))
        throw parameter_error("resonant_energy: malformed ansatz");
    const double omega = M_PI / ansatz.L;
    const int k = ansatz.k;
    if (quad_tol <= 0.0) quad_tol = 1e-12;

    double sum_schw = 0.0; // sum_j int (1+u^2) S[sigma_j] du
    double sum_vel = 0.0;  // sum_j int (1+u^2) s'^2 / (1+s^2)^2 du
    for (const auto& sf : ansatz.sigmas) {
        if (std::holds_alternative<MoebiusElement>(sf)) {
            // S[sigma] vanishes identically; the velocity integrand has the
            // stable closed shape s'/(1+s^2) = 1/(num^2+den^2).
            const MoebiusElement& m = std::get<MoebiusElement>(sf);
            auto f2 = [&](double th) {
                const double u = std::tan(th);
                const double opu = 1.0 + u * u;
                const double num = m.A() * u + m.B();
                const double den = m.C() * u + m.D();
                const double q = num * num + den * den;
                return opu * opu / (q * q);
            };
            sum_vel += num::integrate_adaptive(f2, -M_PI_2, M_PI_2, quad_tol);
        } else {
            auto fS = [&](double th) {
                const double u = std::tan(th);
                const double opu = 1.0 + u * u;
                const auto j = sigma_jet(sf, u);
                if (!(j[1] > 0.0))
                    throw monotonicity_error("resonant_energy: sigma not increasing");
                const double r = j[2] / j[1];
                const double S = j[3] / j[1] - 1.5 * r * r;
                return opu * opu * S;
            };
            auto f2 = [&](double th) {
                const double u = std::tan(th);
                const double opu = 1.0 + u * u;
                const auto j = sigma_jet(sf, u);
                const double ops = 1.0 + j[0] * j[0];
                return opu * opu * j[1] * j[1] / (ops * ops);
            };
            auto [iS, i2] = num::integrate_adaptive_pair(fS, f2, -M_PI_2, M_PI_2,
                                                         quad_tol);
            sum_schw += iS;
            sum_vel += i2;
        }
    }
    return -k * k * omega / 24.0 - k * omega / (48.0 * M_PI) * sum_schw
           + (k * k - 1.0) * omega / (24.0 * k * M_PI) * sum_vel;
}

double resonant_profile(const ResonantAnsatz& ansatz, double tau) {
    if (ansatz.k < 1 || ansatz.sigmas.size() != static_cast<size_t>(ansatz.k))
        throw parameter_error("resonant_profile: malformed ansatz");
    const double omega = M_PI / ansatz.L;
    const int k = ansatz.k;
    auto [j, theta_loc] = resonant_branch(k, ansatz.L, tau);
    const double u = std::tan(theta_loc);
    const double opu = 1.0 + u * u;
    const auto& sf = ansatz.sigmas[static_cast<size_t>(j)];
    const auto sj = sigma_jet(sf, u);
    const double ops = 1.0 + sj[0] * sj[0];
    const double X = sj[1] * sj[1] * opu * opu / (ops * ops);
    double S = 0.0;
    if (!std::holds_alternative<MoebiusElement>(sf)) {
        const double r = sj[2] / sj[1];
        S = sj[3] / sj[1] - 1.5 * r * r;
    }
    const double w2 = omega * omega;
    return (k * k - 1.0) * w2 / (48.0 * M_PI) * X - k * k * w2 / (48.0 * M_PI)
           - k * k * w2 / (96.0 * M_PI) * opu * opu * S;
}

} // namespace dce
