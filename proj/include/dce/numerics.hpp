#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace dce::num {

// Gauss-Legendre rule on [-1, 1]. Nodes are strictly interior, weights
// positive. Computed once per order and cached (thread-safe init).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Adaptive integration of f over [a, b] to an absolute tolerance.
// The interval is first split at the supplied breakpoints, then each
// segment is bisected until the GL15 vs 2xGL15 estimate settles.
// Deterministic: single-threaded, fixed traversal order.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double abs_tol,
                          std::span<const double> breakpoints = {});

// Same partition, two integrands sharing every node. Used where a sum of
// two integrals must decompose exactly (identical mesh for both parts).
// Adapts on f1 + f2; returns the pair (integral of f1, integral of f2).
std::pair<double, double> integrate_adaptive_pair(
    const std::function<double(double)>& f1,
    const std::function<double(double)>& f2,
    double a, double b, double abs_tol,
    std::span<const double> breakpoints = {});

// Panels for oscillatory integrals: [a, b] is cut so that the accumulated
// phase bound rate(tau) * width stays below phase_budget on every panel
// (rate must be a local upper bound on |dPhi/dtau|). Panel ends returned
// in ascending order, starting at a and ending at b.
std::vector<double> oscillatory_panels(const std::function<double(double)>& rate,
                                       double a, double b,
                                       std::span<const double> breakpoints,
                                       double phase_budget);

// Solve f(t) = 0 for monotone f on [lo, hi] by Newton steps guarded by
// bisection. fd is the derivative. Converges to |step| <= tol or throws.
double find_root_monotone(const std::function<double(double)>& f,
                          const std::function<double(double)>& fd,
                          double lo, double hi, double tol);

// FNV-1a over a byte string; used for stable config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace dce::num
