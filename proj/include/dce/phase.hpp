#pragma once

#include "dce/moebius.hpp"
#include "dce/trajectory.hpp"

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace dce {

enum class PhaseBackend {
    Identity,
    Grid,
    SinusoidalAsymptotic,
    LawWuExact,
    MoebiusMinimal,
    Resonant,
    Composed,
    Inverse,
};

// Value and first three derivatives of the phase function at one point.
using PhaseJet = std::array<double, 4>;

// Monotone phase function R(tau) solving (exactly or asymptotically) the
// functional equation R(t + L(t)) - R(t - L(t)) = 2L. Instances are
// immutable and safe for concurrent reads.
class PhaseFunction {
public:
    virtual ~PhaseFunction() = default;

    // {R, dR, d2R, d3R} at tau. One-sided at interior breakpoints.
    virtual PhaseJet jet(double tau) const = 0;

    // R(tau) alone; backends override where that is cheaper.
    virtual double value(double tau) const { return jet(tau)[0]; }

    double deriv(double tau, int order) const;

    virtual std::pair<double, double> domain() const = 0;

    // Points strictly inside (lo, hi) where derivatives may jump.
    // Quadratures split their meshes there.
    virtual std::vector<double> breakpoints_in(double lo, double hi) const {
        (void)lo;
        (void)hi;
        return {};
    }

    // Static cavity length L the solution refers to (omega = pi / L).
    virtual double fundamental_length() const = 0;

    // Smallest tau from which R(tau + 2L) = R(tau) + 2L holds onward.
    virtual double periodic_start() const { return domain().first; }

    virtual PhaseBackend backend() const = 0;
};

// Inner function of the resonant representation: either an SL(2,R)
// element or a monotone callable with jets {s, s', s'', s'''}. A callable
// must grow to +-infinity at +-infinity (junction continuity).
using SigmaJetFn = std::function<std::array<double, 4>(double)>;
using SigmaFunction = std::variant<MoebiusElement, SigmaJetFn>;

// Resonant representation of order k: the 2L period splits into k equal
// pieces, each mapped through its own inner function.
struct ResonantAnsatz {
    int k = 1;
    double L = M_PI;
    std::vector<SigmaFunction> sigmas; // size k
    PhaseBackend tag = PhaseBackend::Resonant;
};

// --- constructors -----------------------------------------------------

// Identity solution R(tau) = tau for a static cavity of length L.
PhasePtr identity_phase(double L, double tau_lo = -1e9, double tau_hi = 1e9);

// Numerical solution by characteristic propagation. Seeds R(tau) = tau on
// [-L, L] and extends to [-L, t_final + L(t_final)]. Derivatives to third
// order propagate through the recursion analytically. The construction is
// verified against the Moore residual tolerance tol (absolute).
PhasePtr solve_phase(const WallTrajectory& traj, double t_final, double tol);

// Closed-form asymptotic solution for the sinusoidal trajectory, with the
// squeeze parameter zeta frozen at t_elapsed.
PhasePtr build_sinusoidal_asymptotic(const WallTrajectory& traj, double t_elapsed);
double sinusoidal_zeta(const WallTrajectory& traj, double t_elapsed);

// Inner functions for the Law/Wu family at a given elapsed time. The time
// symbol in the closed form is ambiguous in the source material; the
// elapsed-time reading is the default, the motion-duration reading is the
// alternative.
enum class LawWuTimeReading { ElapsedTime, MotionDuration };
ResonantAnsatz build_lawwu(const WallTrajectory& traj, double t_elapsed,
                           LawWuTimeReading reading = LawWuTimeReading::ElapsedTime);

// Assembles the k inner functions into a continuous increasing phase
// function, advancing the arctan branch at every half-period of the tan.
PhasePtr assemble_resonant(const ResonantAnsatz& ansatz);

// Inverse function. Closed form for arctan-type backends built from a
// single SL(2,R) element; monotone root finding otherwise.
PhasePtr invert_phase(const PhasePtr& R);

// Mode function A_k(x,t) = N_k [e^{-i w_k R(t+x)} - e^{-i w_k R(t-x)}],
// N_k = (4 pi k)^{-1/2}.
std::complex<double> eval_mode(const PhaseFunction& R, int k, double x, double t);

// --- diagnostics ------------------------------------------------------

// R(t + L(t)) - R(t - L(t)) - 2L.
double moore_residual(const PhaseFunction& R, const WallTrajectory& traj, double t);

// Largest |residual| over n deterministic pseudo-random probes of t with
// [t - L(t), t + L(t)] inside the domain.
double max_moore_residual(const PhaseFunction& R, const WallTrajectory& traj,
                          int n_probes = 1000, std::uint64_t seed = 42);

// Solve R(x) = y for x (monotone).
double invert_value(const PhaseFunction& R, double y);

// Which of the k period pieces tau falls in, and the local tan argument
// theta_loc in [-pi/2, pi/2) with u = tan(theta_loc).
std::pair<int, double> resonant_branch(int k, double L, double tau);

// {s, s', s'', s'''} of an inner function at u.
std::array<double, 4> sigma_jet(const SigmaFunction& sigma, double u);

} // namespace dce
