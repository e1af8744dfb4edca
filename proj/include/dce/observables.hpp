#pragma once

#include "dce/exec.hpp"
#include "dce/phase.hpp"
#include "dce/trajectory.hpp"

#include <vector>

namespace dce {

// Schwarz derivative S[R](tau) = R'''/R' - (3/2)(R''/R')^2.
double schwarzian(const PhaseFunction& R, double tau);

// Profile function rho(tau) = -(pi/48 L^2) R'(tau)^2 - S[R](tau)/(24 pi).
double profile_rho(const PhaseFunction& R, double tau);

// <T00(x,t)> = rho(t+x) + rho(t-x).
double energy_density(const PhaseFunction& R, double x, double t);

// Sampled profile over [tau_lo, tau_hi]. k_max is the largest mode index
// the samples will feed; the sampling must resolve 2L/k_max.
struct EnergyProfile {
    std::vector<double> tau;  // ascending, uniform
    std::vector<double> rho;
    double period_start = 0.0; // smallest tau where the 2L-periodic regime holds
    double L = 0.0;
};

EnergyProfile energy_profile(const PhaseFunction& R, double tau_lo, double tau_hi,
                             int n_samples, int k_max = 1,
                             ExecutionPolicy policy = ExecutionPolicy::Parallel);

// Total energy split into the (always negative) velocity part and the
// Schwarzian part, integrated over [t - L(t), t + L(t)] on a shared mesh.
struct EnergyReport {
    double E_total = 0.0;
    double E_subcasimir = 0.0;
    double E_schwarzian = 0.0;
    double t_eval = 0.0;
};

EnergyReport total_energy(const PhaseFunction& R, const WallTrajectory& traj,
                          double t, double quad_tol = 0.0);

// lhs = -(pi/48 L^2) integral of R'^2, rhs = -pi/(24 L(t)).
struct SubCasimirCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

SubCasimirCheck subcasimir_bound_check(const PhaseFunction& R,
                                       const WallTrajectory& traj, double t,
                                       double quad_tol = 0.0);

// Energy through the T-substitution T = (dR^{-1}/dtau)^{-1/2}:
//   E = (1/12 pi) int_{t'-L}^{t'+L} (Tdot^2 - (omega^2/4) T^2) dtau,
// with t' = R(t-L)+L. Valid once the cavity is static (T is 2L-periodic
// there). Also evaluates the constraint (1/2L) int dtau / T^2, which the
// Moore equation pins to 1.
struct TEnergyResult {
    double energy = 0.0;
    double constraint = 0.0; // should be 1
};

TEnergyResult energy_via_T(const PhasePtr& R, const WallTrajectory& traj,
                           double t, double quad_tol = 0.0);

// Energy of a resonant ansatz by quadrature of the nu-space representation
// (nu mapped through nu = tan(theta)). The Schwarzian integral vanishes
// identically for SL(2,R) inner functions and is skipped for them.
double resonant_energy(const ResonantAnsatz& ansatz, double quad_tol = 0.0);

// rho(tau) evaluated from the nu-space representation; cross-checks the
// direct profile of the assembled phase.
double resonant_profile(const ResonantAnsatz& ansatz, double tau);

} // namespace dce
