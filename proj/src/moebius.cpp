#include "dce/moebius.hpp"
#include "dce/errors.hpp"

#include <cmath>

namespace dce {

MoebiusElement::MoebiusElement(double A, double B, double C, double D) {
    const double det = A * D - B * C;
    if (!(det > 0.0))
        throw parameter_error("moebius: determinant must be positive, got "
                              + std::to_string(det));
    const double s = 1.0 / std::sqrt(det);
    a_ = A * s;
    b_ = B * s;
    c_ = C * s;
    d_ = D * s;
}

double MoebiusElement::operator()(double x) const {
    return (a_ * x + b_) / (c_ * x + d_);
}

double MoebiusElement::deriv(double x) const {
    const double den = c_ * x + d_;
    return 1.0 / (den * den);
}

bool MoebiusElement::is_identity(double tol) const {
    return std::abs(a_ - 1.0) <= tol && std::abs(b_) <= tol
           && std::abs(c_) <= tol && std::abs(d_ - 1.0) <= tol;
}

MoebiusElement compose(const MoebiusElement& m1, const MoebiusElement& m2) {
    // Matrix product; sigma_{m1 m2} = sigma_{m1} o sigma_{m2}.
    return MoebiusElement(m1.A() * m2.A() + m1.B() * m2.C(),
                          m1.A() * m2.B() + m1.B() * m2.D(),
                          m1.C() * m2.A() + m1.D() * m2.C(),
                          m1.C() * m2.B() + m1.D() * m2.D());
}

MoebiusElement inverse(const MoebiusElement& m) {
    return MoebiusElement(m.D(), -m.B(), -m.C(), m.A());
}

double minimal_T_squared(const MoebiusElement& m, double omega, double tau) {
    const double A = m.A(), B = m.B(), C = m.C(), D = m.D();
    return 0.5 * (A * A + B * B + C * C + D * D)
           + 0.5 * (A * A + B * B - C * C - D * D) * std::cos(omega * tau)
           - (A * C + B * D) * std::sin(omega * tau);
}

std::pair<double, double> infinitesimal_flow(double a, double b, double c,
                                             double t, double x, double omega) {
    const double wt = omega * t, wx = omega * x;
    const double dt = (b - c) + (b + c) * std::cos(wt) * std::cos(wx)
                      + 2.0 * a * std::sin(wt) * std::cos(wx);
    const double dx = -(b + c) * std::sin(wt) * std::sin(wx)
                      + 2.0 * a * std::cos(wt) * std::sin(wx);
    return {t + dt / omega, x + dx / omega};
}

} // namespace dce
