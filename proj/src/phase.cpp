#include "dce/phase.hpp"
#include "dce/errors.hpp"
#include "dce/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace dce {

double PhaseFunction::deriv(double tau, int order) const {
    if (order < 0 || order > 3)
        throw parameter_error("phase: derivative order must be 0..3");
    return jet(tau)[static_cast<size_t>(order)];
}

namespace {

constexpr double kWideDomain = 1e9;

[[noreturn]] void out_of_domain(double tau, const std::pair<double, double>& d) {
    throw domain_error("phase: tau = " + std::to_string(tau)
                       + " outside domain [" + std::to_string(d.first) + ", "
                       + std::to_string(d.second) + "]");
}

// splitmix64; deterministic probe sampling.
std::uint64_t mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return (mix64(state) >> 11) * 0x1.0p-53;
}

// ----------------------------------------------------------------------
// Identity backend
// ----------------------------------------------------------------------

class IdentityPhase final : public PhaseFunction {
public:
    IdentityPhase(double L, double lo, double hi) : L_(L), lo_(lo), hi_(hi) {}

    PhaseJet jet(double tau) const override {
        if (tau < lo_ || tau > hi_) out_of_domain(tau, {lo_, hi_});
        return {tau, 1.0, 0.0, 0.0};
    }
    double value(double tau) const override { return jet(tau)[0]; }
    std::pair<double, double> domain() const override { return {lo_, hi_}; }
    double fundamental_length() const override { return L_; }
    PhaseBackend backend() const override { return PhaseBackend::Identity; }

private:
    double L_, lo_, hi_;
};

// ----------------------------------------------------------------------
// Arctan-type backends: R(tau) = (2/w_k) lift[arctan(sigma_j(tan(w_k tau/2)))]
// ----------------------------------------------------------------------

struct SigmaSlot {
    bool moebius = true;
    // Canonical entries with C > 0, or C == 0 and D > 0 (PSL sign choice).
    double A = 1.0, B = 0.0, C = 0.0, D = 1.0;
    SigmaJetFn fn;
    double c_left = -M_PI_2; // infimum of the local branch lift
};

SigmaSlot make_slot(const SigmaFunction& sf) {
    SigmaSlot s;
    if (std::holds_alternative<MoebiusElement>(sf)) {
        const MoebiusElement& m = std::get<MoebiusElement>(sf);
        s.moebius = true;
        s.A = m.A(); s.B = m.B(); s.C = m.C(); s.D = m.D();
        if (s.C < 0.0 || (s.C == 0.0 && s.D < 0.0)) {
            s.A = -s.A; s.B = -s.B; s.C = -s.C; s.D = -s.D;
        }
        s.c_left = (s.C != 0.0) ? std::atan(s.A / s.C) : -M_PI_2;
    } else {
        s.moebius = false;
        s.fn = std::get<SigmaJetFn>(sf);
        if (!s.fn) throw parameter_error("sigma: empty callable");
        s.c_left = -M_PI_2;
    }
    return s;
}

// Continuous increasing lift of arctan(sigma(tan(.))) on one tan branch
// theta_loc in [-pi/2, pi/2); range (c_left, c_left + pi).
double local_lift(const SigmaSlot& s, double theta_loc) {
    const double u = std::tan(theta_loc);
    if (!s.moebius) return std::atan(s.fn(u)[0]);
    if (s.C == 0.0) return std::atan((s.A * u + s.B) / s.D);
    const double den = s.C * u + s.D;
    if (den == 0.0) return M_PI_2;
    return std::atan((s.A * u + s.B) / den) + (den > 0.0 ? M_PI : 0.0);
}

// Branch reduction theta -> (n, theta_loc) with theta_loc in [-pi/2, pi/2).
// Rounding can push the remainder a few ulps across a boundary, where tan
// wraps sign; renormalize so both sides of a junction agree.
void reduce_branch(double theta, double& nd, double& theta_loc) {
    nd = std::floor((theta + M_PI_2) / M_PI);
    theta_loc = theta - nd * M_PI;
    if (theta_loc < -M_PI_2) {
        nd -= 1.0;
        theta_loc += M_PI;
    } else if (theta_loc >= M_PI_2) {
        nd += 1.0;
        theta_loc -= M_PI;
    }
}

class ArctanPhase final : public PhaseFunction {
public:
    ArctanPhase(int k, double L, std::vector<SigmaSlot> slots, PhaseBackend tag,
                long long lift_offset = 0)
        : k_(k), L_(L), omega_k_(k * M_PI / L), slots_(std::move(slots)),
          tag_(tag), offset_(lift_offset) {
        if (k_ < 1) throw parameter_error("resonant phase: k must be >= 1");
        if (slots_.size() != static_cast<size_t>(k_))
            throw parameter_error("resonant phase: need exactly k inner functions");
        // Branch junctions match only if every local lift shares its base angle.
        for (int j = 0; j < k_; ++j) {
            double gap = std::abs(slots_[j].c_left - slots_[(j + 1) % k_].c_left);
            if (gap > 1e-9)
                throw parameter_error(
                    "resonant phase: inner functions give a discontinuous "
                    "assembly at a branch junction (gap " + std::to_string(gap) + ")");
        }
        analytic_ = slots_.front().moebius;
        for (const auto& s : slots_)
            analytic_ = analytic_ && s.moebius && s.A == slots_.front().A
                        && s.B == slots_.front().B && s.C == slots_.front().C
                        && s.D == slots_.front().D;
        // Principal anchoring: place the lift at theta = 0 inside
        // (-pi/2, pi/2], so that equal circle maps give equal functions.
        if (local_lift(slots_.front(), 0.0) > M_PI_2) offset_ -= 1;
    }

    PhaseJet jet(double tau) const override {
        const double theta = 0.5 * omega_k_ * tau;
        double nd, theta_loc;
        reduce_branch(theta, nd, theta_loc);
        const long long n = static_cast<long long>(nd);
        const SigmaSlot& s = slots_[static_cast<size_t>(((n % k_) + k_) % k_)];

        const double lift = (nd + static_cast<double>(offset_)) * M_PI
                            + local_lift(s, theta_loc);
        const double half_w = 0.5 * omega_k_;
        PhaseJet out;
        out[0] = lift / half_w;

        if (s.moebius) {
            const double sn = std::sin(theta_loc), cs = std::cos(theta_loc);
            const double N = s.A * sn + s.B * cs, Dn = s.C * sn + s.D * cs;
            const double Np = s.A * cs - s.B * sn, Dnp = s.C * cs - s.D * sn;
            const double Q = N * N + Dn * Dn;
            const double Qp = 2.0 * (N * Np + Dn * Dnp);
            const double Qpp = 2.0 * (Np * Np + Dnp * Dnp) - 2.0 * Q;
            out[1] = 1.0 / Q;
            out[2] = -half_w * Qp / (Q * Q);
            out[3] = half_w * half_w * (2.0 * Qp * Qp / (Q * Q * Q) - Qpp / (Q * Q));
        } else {
            const double u = std::tan(theta_loc);
            const auto sj = s.fn(u);
            const double s0 = sj[0], s1 = sj[1], s2 = sj[2], s3 = sj[3];
            if (!(s1 > 0.0))
                throw monotonicity_error("resonant phase: sigma not increasing at u="
                                         + std::to_string(u));
            const double opu = 1.0 + u * u;
            const double ops = 1.0 + s0 * s0;
            const double P = s1 * opu / ops;
            // dP/du and d2P/du2 by the chain rule.
            const double T1 = (s2 * opu + 2.0 * u * s1) / ops;
            const double T2 = 2.0 * s0 * s1 * s1 * opu / (ops * ops);
            const double Pp = T1 - T2;
            const double T1p = (s3 * opu + 4.0 * u * s2 + 2.0 * s1) / ops
                               - 2.0 * s0 * s1 * (s2 * opu + 2.0 * u * s1) / (ops * ops);
            const double T2p = 2.0 * (s1 * s1 * s1 * opu + 2.0 * s0 * s1 * s2 * opu
                                      + 2.0 * u * s0 * s1 * s1) / (ops * ops)
                               - 8.0 * s0 * s0 * s1 * s1 * s1 * opu / (ops * ops * ops);
            const double Ppp = T1p - T2p;
            out[1] = P;
            out[2] = half_w * Pp * opu;
            out[3] = half_w * half_w * (Ppp * opu + 2.0 * u * Pp) * opu;
        }
        return out;
    }

    double value(double tau) const override {
        const double theta = 0.5 * omega_k_ * tau;
        double nd, theta_loc;
        reduce_branch(theta, nd, theta_loc);
        const long long n = static_cast<long long>(nd);
        const SigmaSlot& s = slots_[static_cast<size_t>(((n % k_) + k_) % k_)];
        return ((nd + static_cast<double>(offset_)) * M_PI
                + local_lift(s, theta_loc)) / (0.5 * omega_k_);
    }

    std::pair<double, double> domain() const override {
        return {-kWideDomain, kWideDomain};
    }
    double fundamental_length() const override { return L_; }
    PhaseBackend backend() const override { return tag_; }

    // A single SL(2,R) element repeated on every branch gives an analytic
    // R; anything else is merely continuous at branch junctions.
    std::vector<double> breakpoints_in(double lo, double hi) const override {
        if (analytic_) return {};
        std::vector<double> out;
        const double half_w = 0.5 * omega_k_;
        // Junctions at theta = pi/2 + n pi, i.e. tau = (pi/2 + n pi)/half_w.
        const long long n0 = static_cast<long long>(
            std::ceil((lo * half_w - M_PI_2) / M_PI));
        for (long long n = n0;; ++n) {
            const double tau = (M_PI_2 + n * M_PI) / half_w;
            if (tau >= hi) break;
            if (tau > lo) out.push_back(tau);
        }
        return out;
    }

    int order() const { return k_; }
    const std::vector<SigmaSlot>& slots() const { return slots_; }
    long long lift_offset() const { return offset_; }

private:
    int k_;
    double L_;
    double omega_k_;
    std::vector<SigmaSlot> slots_;
    PhaseBackend tag_;
    long long offset_;
    bool analytic_ = false;
};

// ----------------------------------------------------------------------
// Grid backend: characteristic propagation through the Moore recursion
// ----------------------------------------------------------------------

class GridPhase final : public PhaseFunction {
public:
    GridPhase(WallTrajectory traj, double t_final, double root_tol)
        : traj_(std::move(traj)), L_(traj_.length()), root_tol_(root_tol) {
        if (!(t_final > 0.0)) throw parameter_error("solve_phase: t_final must be > 0");
        tau_hi_ = t_final + traj_.eval(t_final, 0);
        tau_static_ = traj_.motion_duration() + L_;
        build_kinks();
    }

    PhaseJet jet(double tau) const override {
        check_domain(tau);
        double acc = reduce_static(tau);
        // Walk the characteristic back to the seed, then unwind the jets.
        std::vector<double> ts;
        while (tau > L_) {
            const double t = solve_backward(tau);
            ts.push_back(t);
            tau = t - traj_.eval(t, 0);
            acc += 2.0 * L_;
        }
        PhaseJet j = {tau + acc, 1.0, 0.0, 0.0};
        for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
            const TrajectoryJet w = traj_.jet(*it);
            const double ld = w[1], ldd = w[2], lddd = w[3];
            const double dn = 1.0 + ld, up = 1.0 - ld;
            const double r1 = j[1] * up / dn;
            const double r2 = (j[2] * up * up - ldd * (j[1] + r1)) / (dn * dn);
            const double r3 = (j[3] * up * up * up
                               - 3.0 * ldd * (up * j[2] + dn * r2)
                               - lddd * (j[1] + r1)) / (dn * dn * dn);
            j = {j[0], r1, r2, r3};
        }
        return j;
    }

    double value(double tau) const override {
        check_domain(tau);
        double acc = reduce_static(tau);
        while (tau > L_) {
            const double t = solve_backward(tau);
            tau = t - traj_.eval(t, 0);
            acc += 2.0 * L_;
        }
        return tau + acc;
    }

    std::pair<double, double> domain() const override { return {-L_, tau_hi_}; }
    std::vector<double> breakpoints_in(double lo, double hi) const override {
        std::vector<double> out;
        for (double b : kinks_)
            if (b > lo && b < hi) out.push_back(b);
        return out;
    }
    double fundamental_length() const override { return L_; }
    double periodic_start() const override {
        return traj_.motion_duration() - L_;
    }
    PhaseBackend backend() const override { return PhaseBackend::Grid; }
    const WallTrajectory& trajectory() const { return traj_; }

private:
    void check_domain(double tau) const {
        const double slack = 1e-9 * L_;
        if (tau < -L_ - slack || tau > tau_hi_ + slack)
            out_of_domain(tau, {-L_, tau_hi_});
    }

    // For tau past the last moving characteristic the step is exactly -2L;
    // collapse all of them at once. Returns the accumulated 2L*m.
    double reduce_static(double& tau) const {
        if (tau < tau_static_) return 0.0;
        const double m = std::floor((tau - tau_static_) / (2.0 * L_)) + 1.0;
        tau -= 2.0 * L_ * m;
        return 2.0 * L_ * m;
    }

    // Solve t + L(t) = tau.
    double solve_backward(double tau) const {
        auto f = [&](double t) { return t + traj_.eval(t, 0) - tau; };
        auto fd = [&](double t) { return 1.0 + traj_.eval(t, 1); };
        try {
            return num::find_root_monotone(f, fd, tau - 2.0 * L_, tau, root_tol_);
        } catch (const solver_error&) {
            throw solver_error("solve_phase: characteristic root-find failed at tau="
                               + std::to_string(tau));
        }
    }

    // Solve t - L(t) = tau and return the forward image t + L(t).
    double forward_image(double tau) const {
        auto f = [&](double t) { return t - traj_.eval(t, 0) - tau; };
        auto fd = [&](double t) { return 1.0 - traj_.eval(t, 1); };
        const double t = num::find_root_monotone(f, fd, tau, tau + 2.0 * L_, root_tol_);
        return t + traj_.eval(t, 0);
    }

    void build_kinks() {
        std::vector<double> out;
        for (double tb : traj_.breakpoints()) {
            double x = tb + traj_.eval(tb, 0);
            while (x < tau_hi_) {
                if (x > -L_) out.push_back(x);
                x = forward_image(x);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(),
                              [&](double a, double b) { return std::abs(a - b) < 1e-12 * L_; }),
                  out.end());
        kinks_ = std::move(out);
    }

    WallTrajectory traj_;
    double L_;
    double root_tol_;
    double tau_hi_ = 0.0;
    double tau_static_ = 0.0;
    std::vector<double> kinks_;
};

// ----------------------------------------------------------------------
// Composition and inversion
// ----------------------------------------------------------------------

class ComposedPhase final : public PhaseFunction {
public:
    ComposedPhase(PhasePtr outer, PhasePtr inner)
        : outer_(std::move(outer)), inner_(std::move(inner)) {
        if (!outer_ || !inner_) throw parameter_error("compose: null phase");
        if (std::abs(outer_->fundamental_length() - inner_->fundamental_length())
            > 1e-9 * inner_->fundamental_length())
            throw domain_error("compose: mismatched cavity lengths");
        const auto od = outer_->domain();
        const auto id = inner_->domain();
        lo_ = id.first;
        hi_ = id.second;
        // Clip so inner values stay inside the outer domain.
        if (inner_->value(lo_) < od.first) lo_ = invert_value(*inner_, od.first);
        if (inner_->value(hi_) > od.second) hi_ = invert_value(*inner_, od.second);
    }

    PhaseJet jet(double tau) const override {
        if (tau < lo_ || tau > hi_) out_of_domain(tau, {lo_, hi_});
        const PhaseJet g = inner_->jet(tau);
        const PhaseJet f = outer_->jet(g[0]);
        PhaseJet out;
        out[0] = f[0];
        out[1] = f[1] * g[1];
        out[2] = f[2] * g[1] * g[1] + f[1] * g[2];
        out[3] = f[3] * g[1] * g[1] * g[1] + 3.0 * f[2] * g[1] * g[2] + f[1] * g[3];
        return out;
    }

    double value(double tau) const override {
        if (tau < lo_ || tau > hi_) out_of_domain(tau, {lo_, hi_});
        return outer_->value(inner_->value(tau));
    }

    std::pair<double, double> domain() const override { return {lo_, hi_}; }
    std::vector<double> breakpoints_in(double lo, double hi) const override {
        lo = std::max(lo, lo_);
        hi = std::min(hi, hi_);
        if (!(hi > lo)) return {};
        std::vector<double> bps = inner_->breakpoints_in(lo, hi);
        // Pull breakpoints of the outer factor back through the inner map.
        for (double b : outer_->breakpoints_in(inner_->value(lo), inner_->value(hi)))
            bps.push_back(invert_value(*inner_, b));
        std::sort(bps.begin(), bps.end());
        return bps;
    }
    double fundamental_length() const override { return inner_->fundamental_length(); }
    double periodic_start() const override {
        return std::max(lo_, inner_->periodic_start());
    }
    PhaseBackend backend() const override { return PhaseBackend::Composed; }

private:
    PhasePtr outer_, inner_;
    double lo_, hi_;
};

class InversePhase final : public PhaseFunction {
public:
    explicit InversePhase(PhasePtr base) : base_(std::move(base)) {
        const auto d = base_->domain();
        lo_ = base_->value(d.first);
        hi_ = base_->value(d.second);
    }

    PhaseJet jet(double tau) const override {
        const double x = pull_back(tau);
        const PhaseJet b = base_->jet(x);
        const double r1 = b[1];
        if (!(r1 > 0.0))
            throw monotonicity_error("invert: base phase not increasing");
        PhaseJet out;
        out[0] = x;
        out[1] = 1.0 / r1;
        out[2] = -b[2] / (r1 * r1 * r1);
        out[3] = (3.0 * b[2] * b[2] - r1 * b[3]) / (r1 * r1 * r1 * r1 * r1);
        return out;
    }

    double value(double tau) const override { return pull_back(tau); }

    std::pair<double, double> domain() const override { return {lo_, hi_}; }
    std::vector<double> breakpoints_in(double lo, double hi) const override {
        lo = std::max(lo, lo_);
        hi = std::min(hi, hi_);
        if (!(hi > lo)) return {};
        std::vector<double> out;
        for (double b : base_->breakpoints_in(pull_back(lo), pull_back(hi)))
            out.push_back(base_->value(b));
        return out;
    }
    double fundamental_length() const override { return base_->fundamental_length(); }
    double periodic_start() const override {
        const double ps = base_->periodic_start();
        return (ps <= base_->domain().first) ? lo_ : base_->value(ps);
    }
    PhaseBackend backend() const override { return PhaseBackend::Inverse; }

private:
    double pull_back(double tau) const {
        if (tau < lo_ || tau > hi_) out_of_domain(tau, {lo_, hi_});
        return invert_value(*base_, tau);
    }

    PhasePtr base_;
    double lo_, hi_;
};

const ArctanPhase* as_arctan(const PhaseFunction& R) {
    return dynamic_cast<const ArctanPhase*>(&R);
}

} // namespace

// ----------------------------------------------------------------------
// Free functions
// ----------------------------------------------------------------------

PhasePtr identity_phase(double L, double tau_lo, double tau_hi) {
    if (!(L > 0.0)) throw parameter_error("identity_phase: L must be positive");
    return std::make_shared<IdentityPhase>(L, tau_lo, tau_hi);
}

PhasePtr solve_phase(const WallTrajectory& traj, double t_final, double tol) {
    auto violations = traj.validate();
    if (!violations.empty())
        throw parameter_error("solve_phase: invalid trajectory: "
                              + violations.front().what);
    if (traj.kind() == MotionKind::Static)
        return identity_phase(traj.length(), -traj.length(),
                              t_final + traj.length());

    const double root_tol = 1e-13 * traj.length();
    auto phase = std::make_shared<GridPhase>(traj, t_final, root_tol);

    // Construction check: the recursion must reproduce the Moore equation.
    const double res = max_moore_residual(*phase, traj, 128, 7);
    if (res > tol)
        throw solver_error("solve_phase: Moore residual " + std::to_string(res)
                           + " exceeds tolerance " + std::to_string(tol));
    return phase;
}

double sinusoidal_zeta(const WallTrajectory& traj, double t_elapsed) {
    if (traj.kind() != MotionKind::Sinusoidal)
        throw parameter_error("sinusoidal_zeta: trajectory is not sinusoidal");
    const int k = traj.drive_index();
    const double sign = (k % 2 == 0) ? -1.0 : 1.0; // (-1)^(k+1)
    return std::exp(sign * traj.drive_omega() * t_elapsed
                    * traj.amplitude() / traj.length());
}

PhasePtr build_sinusoidal_asymptotic(const WallTrajectory& traj, double t_elapsed) {
    const double zeta = sinusoidal_zeta(traj, t_elapsed);
    const double rz = std::sqrt(zeta);
    MoebiusElement m(rz, 0.0, 0.0, 1.0 / rz);
    std::vector<SigmaSlot> slots(traj.drive_index(), make_slot(m));
    return std::make_shared<ArctanPhase>(traj.drive_index(), traj.length(),
                                         std::move(slots),
                                         PhaseBackend::SinusoidalAsymptotic);
}

ResonantAnsatz build_lawwu(const WallTrajectory& traj, double t_elapsed,
                           LawWuTimeReading reading) {
    if (traj.kind() != MotionKind::LawWu)
        throw parameter_error("build_lawwu: trajectory is not of the Law/Wu family");
    const int k = traj.drive_index();
    const double time_sym = (reading == LawWuTimeReading::ElapsedTime)
                                ? t_elapsed
                                : traj.motion_duration();
    const double g = (time_sym / traj.length() - 1.0)
                     * std::tan(0.5 * traj.drive_omega() * traj.amplitude());
    ResonantAnsatz ansatz;
    ansatz.k = k;
    ansatz.L = traj.length();
    const MoebiusElement sigma = (k % 2 == 0)
                                     ? MoebiusElement(1.0, 0.0, -g, 1.0)
                                     : MoebiusElement(1.0, g, 0.0, 1.0);
    ansatz.sigmas.assign(k, SigmaFunction(sigma));
    ansatz.tag = PhaseBackend::LawWuExact;
    return ansatz;
}

PhasePtr assemble_resonant(const ResonantAnsatz& ansatz) {
    if (ansatz.k < 1) throw parameter_error("assemble_resonant: k must be >= 1");
    if (!(ansatz.L > 0.0)) throw parameter_error("assemble_resonant: L must be > 0");
    if (ansatz.sigmas.size() != static_cast<size_t>(ansatz.k))
        throw parameter_error("assemble_resonant: need k inner functions");
    std::vector<SigmaSlot> slots;
    slots.reserve(ansatz.sigmas.size());
    for (const auto& sf : ansatz.sigmas) {
        SigmaSlot s = make_slot(sf);
        if (!s.moebius) {
            // Monotonicity probe over a spread of arguments.
            for (int i = 0; i <= 64; ++i) {
                const double u = std::tan(-M_PI_2 + M_PI * (i + 0.5) / 66.0);
                if (!(s.fn(u)[1] > 0.0))
                    throw monotonicity_error(
                        "assemble_resonant: sigma not increasing at u=" + std::to_string(u));
            }
        }
        slots.push_back(std::move(s));
    }
    return std::make_shared<ArctanPhase>(ansatz.k, ansatz.L, std::move(slots),
                                         ansatz.tag);
}

PhasePtr minimal_phase(const MoebiusElement& m, double omega) {
    if (!(omega > 0.0)) throw parameter_error("minimal_phase: omega must be > 0");
    std::vector<SigmaSlot> slots{make_slot(m)};
    return std::make_shared<ArctanPhase>(1, M_PI / omega, std::move(slots),
                                         PhaseBackend::MoebiusMinimal);
}

PhasePtr conformal_compose(const PhasePtr& R, const MoebiusElement& m) {
    if (!R) throw parameter_error("conformal_compose: null phase");
    if (m.is_identity()) return R;
    // The minimal map acts on the out-going characteristics: R -> R_min o R.
    // This leaves the energy density and the photon spectrum untouched.
    const double omega = M_PI / R->fundamental_length();
    return std::make_shared<ComposedPhase>(minimal_phase(m, omega), R);
}

PhasePtr invert_phase(const PhasePtr& R) {
    if (!R) throw parameter_error("invert_phase: null phase");
    if (R->backend() == PhaseBackend::Identity) return R;
    if (const ArctanPhase* ap = as_arctan(*R)) {
        // Closed form when a single element repeats across all branches.
        const auto& slots = ap->slots();
        bool uniform_moebius = slots.front().moebius;
        for (const auto& s : slots)
            uniform_moebius = uniform_moebius && s.moebius
                              && s.A == slots.front().A && s.B == slots.front().B
                              && s.C == slots.front().C && s.D == slots.front().D;
        if (uniform_moebius) {
            const SigmaSlot& s = slots.front();
            MoebiusElement inv = inverse(MoebiusElement(s.A, s.B, s.C, s.D));
            std::vector<SigmaSlot> islots(slots.size(), make_slot(inv));
            auto cand = std::make_shared<ArctanPhase>(
                ap->order(), ap->fundamental_length(), std::move(islots),
                PhaseBackend::MoebiusMinimal, 0);
            // The two lift conventions may disagree by a multiple of the
            // branch length; pin the integer offset on a round trip.
            const double probe = 0.37 * ap->fundamental_length() / ap->order();
            const double half_w = 0.5 * ap->order() * M_PI / ap->fundamental_length();
            const double delta = (cand->value(R->value(probe)) - probe) * half_w;
            const long long off = -std::llround(delta / M_PI);
            if (off != 0) {
                std::vector<SigmaSlot> islots2(slots.size(), make_slot(inv));
                cand = std::make_shared<ArctanPhase>(
                    ap->order(), ap->fundamental_length(), std::move(islots2),
                    PhaseBackend::MoebiusMinimal, off);
            }
            if (std::abs(cand->value(R->value(probe)) - probe)
                > 1e-9 * ap->fundamental_length())
                throw solver_error("invert_phase: closed-form inverse failed round trip");
            return cand;
        }
    }
    return std::make_shared<InversePhase>(R);
}

std::complex<double> eval_mode(const PhaseFunction& R, int k, double x, double t) {
    if (k < 1) throw parameter_error("eval_mode: k must be >= 1");
    if (x < 0.0) throw domain_error("eval_mode: x must be >= 0");
    const double L = R.fundamental_length();
    double wall = L;
    if (const auto* gp = dynamic_cast<const GridPhase*>(&R))
        wall = gp->trajectory().eval(t, 0);
    if (x > wall * (1.0 + 1e-12))
        throw domain_error("eval_mode: x outside the cavity");
    const double wk = k * M_PI / L;
    const std::complex<double> i(0.0, 1.0);
    const double nk = 1.0 / std::sqrt(4.0 * M_PI * k);
    return nk * (std::exp(-i * wk * R.value(t + x)) - std::exp(-i * wk * R.value(t - x)));
}

double moore_residual(const PhaseFunction& R, const WallTrajectory& traj, double t) {
    const double Lt = traj.eval(t, 0);
    return R.value(t + Lt) - R.value(t - Lt) - 2.0 * traj.length();
}

double max_moore_residual(const PhaseFunction& R, const WallTrajectory& traj,
                          int n_probes, std::uint64_t seed) {
    const auto d = R.domain();
    const double L = traj.length();
    const double Lmax = L + traj.amplitude();
    // Probe around the motion window and its tail. Unbounded analytic
    // backends would otherwise be sampled at astronomical tau, where the
    // branch reduction of theta legitimately runs out of digits.
    double lo = std::max(d.first + Lmax * (1.0 + 1e-9), -20.0 * L);
    double hi = std::min(d.second - Lmax * (1.0 + 1e-9),
                         std::max(traj.motion_duration() + 20.0 * L,
                                  lo + 40.0 * L));
    if (!(hi > lo)) throw domain_error("max_moore_residual: domain too small");
    std::uint64_t state = seed;
    double worst = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        const double t = lo + (hi - lo) * uniform01(state);
        worst = std::max(worst, std::abs(moore_residual(R, traj, t)));
    }
    return worst;
}

std::pair<int, double> resonant_branch(int k, double L, double tau) {
    const double theta = 0.5 * (k * M_PI / L) * tau;
    double nd, theta_loc;
    reduce_branch(theta, nd, theta_loc);
    const long long n = static_cast<long long>(nd);
    return {static_cast<int>(((n % k) + k) % k), theta_loc};
}

std::array<double, 4> sigma_jet(const SigmaFunction& sigma, double u) {
    if (std::holds_alternative<MoebiusElement>(sigma)) {
        const MoebiusElement& m = std::get<MoebiusElement>(sigma);
        const double den = m.C() * u + m.D();
        const double d2 = den * den;
        return {(m.A() * u + m.B()) / den, 1.0 / d2,
                -2.0 * m.C() / (d2 * den), 6.0 * m.C() * m.C() / (d2 * d2)};
    }
    return std::get<SigmaJetFn>(sigma)(u);
}

double invert_value(const PhaseFunction& R, double y) {
    const auto d = R.domain();
    const double L = R.fundamental_length();
    // Expanding bracket around y (R stays within a bounded shift of tau).
    double lo = std::max(d.first, y - 2.0 * L);
    double hi = std::min(d.second, y + 2.0 * L);
    auto f = [&](double x) { return R.value(x) - y; };
    for (int i = 0; i < 64 && f(lo) > 0.0; ++i)
        lo = std::max(d.first, lo - (hi - lo));
    for (int i = 0; i < 64 && f(hi) < 0.0; ++i)
        hi = std::min(d.second, hi + (hi - lo));
    if (f(lo) > 0.0 || f(hi) < 0.0)
        throw domain_error("invert_value: y = " + std::to_string(y)
                           + " outside the range of R");
    auto fd = [&](double x) { return R.jet(x)[1]; };
    return num::find_root_monotone(f, fd, lo, hi, 1e-14 * std::max(1.0, std::abs(y)));
}

} // namespace dce
