#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace dce {

enum class MotionKind { Static, Sinusoidal, LawWu, Custom };

// Value + first three derivatives of L(t) at one instant.
using TrajectoryJet = std::array<double, 4>;

struct TrajectoryViolation {
    double t;
    std::string what;
};

// Wall trajectory L(t) in natural units (c = hbar = 1). The cavity is
// static with length L for t <= 0 and t >= T_motion; in between the right
// wall follows the selected motion model. Immutable; evaluation is pure.
class WallTrajectory {
public:
    // Static cavity of length L.
    static WallTrajectory make_static(double L);

    // L(t) = L + delta_L * sin(omega_k t), omega_k = k pi / L.
    // T_motion = periods * (2 pi / omega_k); an integer period count keeps
    // the wall position continuous at start and stop.
    static WallTrajectory make_sinusoidal(double L, double delta_L, int k_drive,
                                          int periods);

    // L(t) = L + (1/omega_k) (asin[sin(omega_k dL/2) cos(omega_k t)] - omega_k dL/2).
    static WallTrajectory make_lawwu(double L, double delta_L, int k_drive,
                                     int periods);

    // Caller supplies value and three derivatives for t in (0, T_motion);
    // outside the window the static values are returned automatically.
    static WallTrajectory make_custom(double L, double T_motion,
                                      std::function<TrajectoryJet(double)> jet);

    MotionKind kind() const { return kind_; }
    double length() const { return L_; }
    double motion_duration() const { return T_motion_; }
    double amplitude() const { return delta_L_; }
    int drive_index() const { return k_drive_; }
    double drive_omega() const; // k pi / L

    // d^order L / dt^order; order in {0,1,2,3}.
    double eval(double t, int order = 0) const;
    TrajectoryJet jet(double t) const;

    // Times in [0, T_motion] where smoothness of L(t) may fail. Both model
    // families are analytic inside the window, so this is the on/off pair.
    std::vector<double> breakpoints() const;

    // Empty iff all invariants hold on a dense scan of [0, T_motion].
    std::vector<TrajectoryViolation> validate() const;

private:
    WallTrajectory() = default;

    MotionKind kind_ = MotionKind::Static;
    double L_ = 1.0;
    double T_motion_ = 0.0;
    double delta_L_ = 0.0;
    int k_drive_ = 1;
    std::function<TrajectoryJet(double)> custom_;
};

double eval_trajectory(const WallTrajectory& traj, double t, int order);
std::vector<TrajectoryViolation> validate_trajectory(const WallTrajectory& traj);

} // namespace dce
