#pragma once

#include <memory>
#include <utility>

namespace dce {

class PhaseFunction;
using PhasePtr = std::shared_ptr<const PhaseFunction>;

// SL(2,R) element acting on the real line as sigma(x) = (Ax+B)/(Cx+D).
// Inputs with positive determinant are rescaled to det = 1 at construction;
// negative determinants are rejected (orientation-reversing maps are not
// monotone increasing).
class MoebiusElement {
public:
    MoebiusElement() : a_(1.0), b_(0.0), c_(0.0), d_(1.0) {}
    MoebiusElement(double A, double B, double C, double D);

    static MoebiusElement identity() { return {}; }

    double A() const { return a_; }
    double B() const { return b_; }
    double C() const { return c_; }
    double D() const { return d_; }

    double operator()(double x) const;
    double deriv(double x) const; // 1 / (Cx + D)^2

    bool is_identity(double tol = 0.0) const;

private:
    double a_, b_, c_, d_;
};

MoebiusElement compose(const MoebiusElement& m1, const MoebiusElement& m2);
MoebiusElement inverse(const MoebiusElement& m);

// T_min^2(tau) of the minimal solution attached to m:
//   1/2 (A^2+B^2+C^2+D^2) + 1/2 (A^2+B^2-C^2-D^2) cos(omega tau)
//   - (AC+BD) sin(omega tau)
// Strictly positive for any det-1 element; equals 1 / d(R_min^-1)/dtau.
double minimal_T_squared(const MoebiusElement& m, double omega, double tau);

// Phase function R_min(tau) = (2/omega) arctan(sigma(tan(omega tau / 2)))
// with branches chosen so R_min is continuous and strictly increasing.
PhasePtr minimal_phase(const MoebiusElement& m, double omega);

// Applies the symmetry attached to m to an existing phase function.
// The transformed solution carries the same energy density and photon
// spectrum; see the phase module for the composed backend.
PhasePtr conformal_compose(const PhasePtr& R, const MoebiusElement& m);

// First-order conformal coordinate flow for m = (1+a, b; c, 1-a):
//   omega t' = omega t + (b-c) + (b+c) cos(wt) cos(wx) + 2a sin(wt) cos(wx)
//   omega x' = omega x - (b+c) sin(wt) sin(wx) + 2a cos(wt) sin(wx)
// Valid for small a, b, c; fixes the walls x = 0 and x = L exactly.
std::pair<double, double> infinitesimal_flow(double a, double b, double c,
                                             double t, double x, double omega);

} // namespace dce
