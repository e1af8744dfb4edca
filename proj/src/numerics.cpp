#include "dce/numerics.hpp"
#include "dce/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>

namespace dce::num {

namespace {

GaussRule make_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi-style initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

std::mutex g_rules_mutex;
std::map<int, GaussRule> g_rules;

template <typename F>
double gl_sum(const F& f, const GaussRule& r, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

// Splits [a, b] at interior breakpoints; returns segment edges.
std::vector<double> segment_edges(double a, double b,
                                  std::span<const double> breakpoints) {
    std::vector<double> edges;
    edges.push_back(a);
    std::vector<double> bps(breakpoints.begin(), breakpoints.end());
    std::sort(bps.begin(), bps.end());
    const double eps = 1e-14 * (std::abs(a) + std::abs(b) + 1.0);
    for (double t : bps)
        if (t > a + eps && t < b - eps && t > edges.back() + eps)
            edges.push_back(t);
    edges.push_back(b);
    return edges;
}

struct PairResult {
    double i1 = 0.0;
    double i2 = 0.0;
};

void adapt_pair(const std::function<double(double)>& f1,
                const std::function<double(double)>& f2,
                double a, double b, double tol, int depth, PairResult& acc) {
    const GaussRule& r = gauss_legendre(15);
    double w1 = gl_sum(f1, r, a, b), w2 = gl_sum(f2, r, a, b);
    double m = 0.5 * (a + b);
    double l1 = gl_sum(f1, r, a, m), l2 = gl_sum(f2, r, a, m);
    double r1 = gl_sum(f1, r, m, b), r2 = gl_sum(f2, r, m, b);
    double err = std::abs(l1 + r1 - w1) + std::abs(l2 + r2 - w2);
    // Width floor: below it the difference is pure roundoff.
    const bool floor_hit = (b - a) <= 1e-12 * (std::abs(a) + std::abs(b) + 1.0);
    if (err <= tol || floor_hit || depth >= 48) {
        if (depth >= 48 && !floor_hit && err > 1e6 * tol)
            throw numerical_error("adaptive quadrature stalled on ["
                                  + std::to_string(a) + ", " + std::to_string(b)
                                  + "], err=" + std::to_string(err));
        acc.i1 += l1 + r1;
        acc.i2 += l2 + r2;
        return;
    }
    adapt_pair(f1, f2, a, m, 0.5 * tol, depth + 1, acc);
    adapt_pair(f1, f2, m, b, 0.5 * tol, depth + 1, acc);
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

std::pair<double, double> integrate_adaptive_pair(
    const std::function<double(double)>& f1,
    const std::function<double(double)>& f2,
    double a, double b, double abs_tol,
    std::span<const double> breakpoints) {
    if (!(b > a)) {
        if (a == b) return {0.0, 0.0};
        throw parameter_error("integrate: b < a");
    }
    auto edges = segment_edges(a, b, breakpoints);
    PairResult acc;
    const double total = b - a;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double seg_tol = abs_tol * (edges[i + 1] - edges[i]) / total;
        adapt_pair(f1, f2, edges[i], edges[i + 1], std::max(seg_tol, 1e-300), 0, acc);
    }
    return {acc.i1, acc.i2};
}

double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double abs_tol,
                          std::span<const double> breakpoints) {
    auto zero = [](double) { return 0.0; };
    return integrate_adaptive_pair(f, zero, a, b, abs_tol, breakpoints).first;
}

std::vector<double> oscillatory_panels(const std::function<double(double)>& rate,
                                       double a, double b,
                                       std::span<const double> breakpoints,
                                       double phase_budget) {
    auto edges = segment_edges(a, b, breakpoints);
    std::vector<double> panels;
    panels.push_back(a);
    // Bound the rate on a candidate panel by sampling; refine by bisection
    // until the phase across the panel fits the budget. The sample count
    // must not miss narrow rate peaks of squeezed phase functions.
    std::function<void(double, double, int)> split = [&](double lo, double hi, int depth) {
        double rmax = 0.0;
        for (int i = 0; i <= 32; ++i)
            rmax = std::max(rmax, rate(lo + (hi - lo) * i / 32.0));
        if (rmax * (hi - lo) <= phase_budget || depth >= 48) {
            panels.push_back(hi);
            return;
        }
        double m = 0.5 * (lo + hi);
        split(lo, m, depth + 1);
        split(m, hi, depth + 1);
    };
    for (size_t i = 0; i + 1 < edges.size(); ++i)
        split(edges[i], edges[i + 1], 0);
    return panels;
}

double find_root_monotone(const std::function<double(double)>& f,
                          const std::function<double(double)>& fd,
                          double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw solver_error("find_root_monotone: no sign change in bracket ["
                           + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const bool rising = fhi > 0.0;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double fx = f(x);
        if ((fx > 0.0) == rising)
            hi = x;
        else
            lo = x;
        double d = fd(x);
        double step = (d != 0.0) ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi); // bisection fallback
        double dx = std::abs(xn - x);
        x = xn;
        if (dx <= tol || hi - lo <= tol) return x;
    }
    throw solver_error("find_root_monotone: no convergence near "
                       + std::to_string(x));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace dce::num
