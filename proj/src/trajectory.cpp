#include "dce/trajectory.hpp"
#include "dce/errors.hpp"

#include <cmath>

namespace dce {

namespace {

TrajectoryJet sinusoidal_jet(double L, double dL, double w, double t) {
    const double s = std::sin(w * t), c = std::cos(w * t);
    return {L + dL * s, dL * w * c, -dL * w * w * s, -dL * w * w * w * c};
}

// L(t) = L + (g(t) - wk dL/2) / wk with g = asin(u), u = s0 cos(wk t),
// s0 = sin(wk dL / 2). |u| <= s0 < 1, so g is analytic on the window.
TrajectoryJet lawwu_jet(double L, double dL, double w, double t) {
    const double s0 = std::sin(0.5 * w * dL);
    const double u = s0 * std::cos(w * t);
    const double u1 = -s0 * w * std::sin(w * t);
    const double u2 = -w * w * u;
    const double u3 = -w * w * u1;
    const double wsq = 1.0 - u * u;
    const double root = std::sqrt(wsq);
    const double g1 = u1 / root;
    const double g2 = u2 / root + u1 * u1 * u / (wsq * root);
    const double g3 = u3 / root + 3.0 * u * u1 * u2 / (wsq * root)
                      + u1 * u1 * u1 * (1.0 + 2.0 * u * u) / (wsq * wsq * root);
    const double g0 = std::asin(u);
    return {L + (g0 - 0.5 * w * dL) / w, g1 / w, g2 / w, g3 / w};
}

} // namespace

WallTrajectory WallTrajectory::make_static(double L) {
    if (!(L > 0.0)) throw parameter_error("trajectory: L must be positive");
    WallTrajectory t;
    t.kind_ = MotionKind::Static;
    t.L_ = L;
    return t;
}

WallTrajectory WallTrajectory::make_sinusoidal(double L, double delta_L,
                                               int k_drive, int periods) {
    if (!(L > 0.0)) throw parameter_error("trajectory: L must be positive");
    if (k_drive < 1) throw parameter_error("trajectory: k_drive must be >= 1");
    if (periods < 1) throw parameter_error("trajectory: periods must be >= 1");
    if (!(delta_L >= 0.0 && delta_L < L))
        throw parameter_error("trajectory: need 0 <= delta_L < L");
    WallTrajectory t;
    t.kind_ = MotionKind::Sinusoidal;
    t.L_ = L;
    t.delta_L_ = delta_L;
    t.k_drive_ = k_drive;
    t.T_motion_ = periods * 2.0 * M_PI / (k_drive * M_PI / L);
    return t;
}

WallTrajectory WallTrajectory::make_lawwu(double L, double delta_L,
                                          int k_drive, int periods) {
    WallTrajectory t = make_sinusoidal(L, delta_L, k_drive, periods);
    t.kind_ = MotionKind::LawWu;
    return t;
}

WallTrajectory WallTrajectory::make_custom(double L, double T_motion,
                                           std::function<TrajectoryJet(double)> jet) {
    if (!(L > 0.0)) throw parameter_error("trajectory: L must be positive");
    if (!(T_motion >= 0.0)) throw parameter_error("trajectory: T_motion < 0");
    if (!jet) throw parameter_error("trajectory: missing jet callable");
    WallTrajectory t;
    t.kind_ = MotionKind::Custom;
    t.L_ = L;
    t.T_motion_ = T_motion;
    t.custom_ = std::move(jet);
    return t;
}

double WallTrajectory::drive_omega() const { return k_drive_ * M_PI / L_; }

TrajectoryJet WallTrajectory::jet(double t) const {
    if (t <= 0.0 || t >= T_motion_ || kind_ == MotionKind::Static)
        return {L_, 0.0, 0.0, 0.0};
    switch (kind_) {
        case MotionKind::Sinusoidal:
            return sinusoidal_jet(L_, delta_L_, drive_omega(), t);
        case MotionKind::LawWu:
            return lawwu_jet(L_, delta_L_, drive_omega(), t);
        case MotionKind::Custom:
            return custom_(t);
        default:
            return {L_, 0.0, 0.0, 0.0};
    }
}

double WallTrajectory::eval(double t, int order) const {
    if (order < 0 || order > 3)
        throw parameter_error("trajectory: derivative order must be 0..3");
    return jet(t)[static_cast<size_t>(order)];
}

std::vector<double> WallTrajectory::breakpoints() const {
    if (kind_ == MotionKind::Static || T_motion_ <= 0.0) return {};
    return {0.0, T_motion_};
}

std::vector<TrajectoryViolation> WallTrajectory::validate() const {
    std::vector<TrajectoryViolation> out;
    if (!(L_ > 0.0)) out.push_back({0.0, "L must be positive"});
    if (!(delta_L_ >= 0.0 && delta_L_ < L_))
        out.push_back({0.0, "amplitude bound 0 <= delta_L < L violated"});
    if (kind_ == MotionKind::Static) return out;

    // Closed-form speed bounds where available.
    if (kind_ == MotionKind::Sinusoidal && drive_omega() * delta_L_ >= 1.0)
        out.push_back({0.0, "superluminal: omega_k * delta_L >= 1"});
    if (kind_ == MotionKind::LawWu && std::tan(0.5 * drive_omega() * delta_L_) >= 1.0)
        out.push_back({0.0, "superluminal: tan(omega_k delta_L / 2) >= 1"});

    const int n = std::max(2000, 400 * std::max(1, int(T_motion_ / (2.0 * L_))));
    double min_len = L_;
    for (int i = 0; i <= n; ++i) {
        const double t = T_motion_ * i / n;
        const TrajectoryJet j = jet(t);
        if (!(j[0] > 0.0)) {
            out.push_back({t, "cavity length L(t) <= 0"});
            break;
        }
        min_len = std::min(min_len, j[0]);
        if (std::abs(j[1]) >= 1.0) {
            out.push_back({t, "superluminal wall: |dL/dt| >= 1"});
            break;
        }
    }
    // Continuity at the on/off instants.
    for (double t : {0.0, T_motion_}) {
        const double inside = jet(std::clamp(t, 1e-12 * L_, T_motion_ - 1e-12 * L_))[0];
        if (std::abs(inside - L_) > 1e-9 * L_)
            out.push_back({t, "wall position discontinuous at motion boundary"});
    }
    return out;
}

double eval_trajectory(const WallTrajectory& traj, double t, int order) {
    return traj.eval(t, order);
}

std::vector<TrajectoryViolation> validate_trajectory(const WallTrajectory& traj) {
    return traj.validate();
}

} // namespace dce
