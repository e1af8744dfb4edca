#include "dce/particles.hpp"
#include "dce/errors.hpp"
#include "dce/numerics.hpp"

#ifdef DCE_HAVE_OPENMP
#include <omp.h>
#endif

#include <cmath>

namespace dce {

namespace {

// Phase change allowed per 16-point panel: at 2 pi the Gauss rule resolves
// the oscillation to machine precision, which the near-zero coefficients of
// minimal solutions rely on.
constexpr double kPhaseBudget = 2.0 * M_PI;
constexpr int kPanelOrder = 16;

void fill_nodes(const PhaseFunction& R, const std::vector<double>& panels,
                PhaseNodeTable& tbl, ExecutionPolicy policy) {
    const auto& rule = num::gauss_legendre(kPanelOrder);
    const int n_panels = static_cast<int>(panels.size()) - 1;
    const int n = n_panels * kPanelOrder;
    tbl.tau.resize(n);
    tbl.weight.resize(n);
    tbl.R.resize(n);
    for (int p = 0; p < n_panels; ++p) {
        const double c = 0.5 * (panels[p] + panels[p + 1]);
        const double h = 0.5 * (panels[p + 1] - panels[p]);
        for (int i = 0; i < kPanelOrder; ++i) {
            tbl.tau[p * kPanelOrder + i] = c + h * rule.nodes[i];
            tbl.weight[p * kPanelOrder + i] = h * rule.weights[i];
        }
    }
    if (policy == ExecutionPolicy::Parallel) {
#ifdef DCE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n; ++i) tbl.R[i] = R.value(tbl.tau[i]);
    } else {
        for (int i = 0; i < n; ++i) tbl.R[i] = R.value(tbl.tau[i]);
    }
}

// beta uses exp(-i(w_k R + w_l tau)); alpha flips the sign of the w_l term.
std::complex<double> window_sum(const PhaseNodeTable& tbl, int k, int l,
                                double l_sign) {
    const double wk = k * M_PI / tbl.L;
    const double wl = l * M_PI / tbl.L;
    std::complex<double> acc(0.0, 0.0);
    const size_t n = tbl.tau.size();
    for (size_t i = 0; i < n; ++i) {
        const double phase = wk * tbl.R[i] + l_sign * wl * tbl.tau[i];
        acc += tbl.weight[i] * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    return acc;
}

void require_mode(int k, int l) {
    if (k < 1 || l < 1)
        throw parameter_error("bogolubov: mode indices must be >= 1");
}

// One row of the coefficient matrix; the l-dependence is a geometric
// factor per node, updated incrementally.
void fill_row(const PhaseNodeTable& tbl, int k, int l_max, double l_sign,
              double prefactor_sign, std::complex<double>* row) {
    const double wk = k * M_PI / tbl.L;
    const double wl = M_PI / tbl.L;
    for (int l = 0; l < l_max; ++l) row[l] = {0.0, 0.0};
    const size_t n = tbl.tau.size();
    for (size_t i = 0; i < n; ++i) {
        const double pk = wk * tbl.R[i];
        std::complex<double> uk(std::cos(pk), -std::sin(pk));
        const double pl = l_sign * wl * tbl.tau[i];
        const std::complex<double> vstep(std::cos(pl), -std::sin(pl));
        std::complex<double> v = vstep;
        const std::complex<double> base = tbl.weight[i] * uk;
        for (int l = 0; l < l_max; ++l) {
            row[l] += base * v;
            v *= vstep;
        }
    }
    for (int l = 0; l < l_max; ++l)
        row[l] *= prefactor_sign * std::sqrt((l + 1.0) / k) / (2.0 * tbl.L);
}

std::vector<std::complex<double>> fill_matrix(const PhaseNodeTable& tbl, int k_max,
                                              int l_max, double l_sign,
                                              double prefactor_sign,
                                              ExecutionPolicy policy) {
    std::vector<std::complex<double>> out(static_cast<size_t>(k_max) * l_max);
    if (policy == ExecutionPolicy::Parallel) {
#ifdef DCE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int k = 1; k <= k_max; ++k)
            fill_row(tbl, k, l_max, l_sign, prefactor_sign,
                     out.data() + static_cast<size_t>(k - 1) * l_max);
    } else {
        for (int k = 1; k <= k_max; ++k)
            fill_row(tbl, k, l_max, l_sign, prefactor_sign,
                     out.data() + static_cast<size_t>(k - 1) * l_max);
    }
    return out;
}

double submatrix_N(const std::vector<std::complex<double>>& beta, int l_max,
                   int sub) {
    // n_k = sum_l |beta[l][k]|^2 over rows l; N = sum over columns k.
    double N = 0.0;
    for (int k = 1; k <= sub; ++k) {
        double nk = 0.0;
        for (int l = 1; l <= sub; ++l)
            nk += std::norm(beta[static_cast<size_t>(l - 1) * l_max + (k - 1)]);
        N += nk;
    }
    return N;
}

} // namespace

PhaseNodeTable build_node_table(const PhaseFunction& R, double t, int k_max,
                                int l_max, ExecutionPolicy policy) {
    if (k_max < 1 || l_max < 1)
        throw parameter_error("node table: k_max and l_max must be >= 1");
    const double L = R.fundamental_length();
    PhaseNodeTable tbl;
    tbl.L = L;
    tbl.t_center = t;
    const double wk = k_max * M_PI / L, wl = l_max * M_PI / L;
    auto rate = [&](double tau) { return wk * R.jet(tau)[1] + wl; };
    auto panels = num::oscillatory_panels(rate, t - L, t + L,
                                          R.breakpoints_in(t - L, t + L), kPhaseBudget);
    fill_nodes(R, panels, tbl, policy);
    return tbl;
}

std::complex<double> bogolubov_from_table(const PhaseNodeTable& tbl, int k, int l) {
    require_mode(k, l);
    return -std::sqrt(double(l) / k) / (2.0 * tbl.L) * window_sum(tbl, k, l, 1.0);
}

std::complex<double> alpha_from_table(const PhaseNodeTable& tbl, int k, int l) {
    require_mode(k, l);
    return std::sqrt(double(l) / k) / (2.0 * tbl.L) * window_sum(tbl, k, l, -1.0);
}

std::complex<double> bogolubov_direct(const PhaseFunction& R, double t, int k, int l) {
    require_mode(k, l);
    auto tbl = build_node_table(R, t, k, l, ExecutionPolicy::Serial);
    return bogolubov_from_table(tbl, k, l);
}

std::complex<double> alpha_direct(const PhaseFunction& R, double t, int k, int l) {
    require_mode(k, l);
    auto tbl = build_node_table(R, t, k, l, ExecutionPolicy::Serial);
    return alpha_from_table(tbl, k, l);
}

std::vector<std::complex<double>> bogolubov_matrix(const PhaseNodeTable& tbl,
                                                   int k_max, int l_max,
                                                   ExecutionPolicy policy) {
    return fill_matrix(tbl, k_max, l_max, 1.0, -1.0, policy);
}

std::vector<std::complex<double>> alpha_matrix(const PhaseNodeTable& tbl,
                                               int k_max, int l_max,
                                               ExecutionPolicy policy) {
    return fill_matrix(tbl, k_max, l_max, -1.0, 1.0, policy);
}

std::complex<double> bogolubov_resonant(const ResonantAnsatz& ansatz, int k, int l) {
    require_mode(k, l);
    if (ansatz.k < 1 || ansatz.sigmas.size() != static_cast<size_t>(ansatz.k))
        throw parameter_error("bogolubov_resonant: malformed ansatz");
    const int K = ansatz.k;
    const double L = ansatz.L;
    PhasePtr R = assemble_resonant(ansatz);
    const double half_w = 0.5 * K * M_PI / L; // omega_K / 2
    const double piece = 2.0 * L / K;         // tau length of one branch

    const std::complex<double> i1(0.0, 1.0);
    std::complex<double> acc(0.0, 0.0);
    const double ck = 2.0 * k / double(K), cl = 2.0 * l / double(K);
    for (int j = 0; j < K; ++j) {
        // Branch j covers theta in (-pi/2 + j pi, pi/2 + j pi); its local
        // lift is phi_j(theta_loc) = (omega_K/2) R(tau) - j pi.
        auto integrand_phase = [&](double th_loc) {
            const double tau = (th_loc + j * M_PI) / half_w;
            const double phi = half_w * R->value(tau) - j * M_PI;
            return ck * phi + cl * th_loc;
        };
        auto rate = [&](double th_loc) {
            const double tau = (th_loc + j * M_PI) / half_w;
            return ck * R->jet(tau)[1] + cl;
        };
        auto panels = num::oscillatory_panels(rate, -M_PI_2, M_PI_2, {},
                                              kPhaseBudget);
        const auto& rule = num::gauss_legendre(kPanelOrder);
        std::complex<double> branch(0.0, 0.0);
        for (size_t p = 0; p + 1 < panels.size(); ++p) {
            const double c = 0.5 * (panels[p] + panels[p + 1]);
            const double h = 0.5 * (panels[p + 1] - panels[p]);
            for (int q = 0; q < kPanelOrder; ++q) {
                const double th = c + h * rule.nodes[q];
                const double ph = integrand_phase(th);
                branch += h * rule.weights[q]
                          * std::complex<double>(std::cos(ph), -std::sin(ph));
            }
        }
        // exp(-2 pi i j (k+l) / K) from the branch offsets.
        const double jp = -2.0 * M_PI * j * (k + l) / double(K);
        acc += std::exp(i1 * jp) * branch;
    }
    return -std::sqrt(double(l) / k) / (K * M_PI) * acc;
}

std::vector<double> photon_numbers(const PhaseFunction& R, double t, int k_count,
                                   double rel_tol, ExecutionPolicy policy,
                                   int l_rows_cap) {
    if (k_count < 1) throw parameter_error("photon_numbers: k_count must be >= 1");
    constexpr double kFloor = 1e-12;
    int rows = std::max(32, 2 * k_count);
    std::vector<double> nk(k_count, 0.0), prev;
    for (;;) {
        auto tbl = build_node_table(R, t, rows, k_count, policy);
        auto beta = bogolubov_matrix(tbl, rows, k_count, policy);
        for (int k = 1; k <= k_count; ++k) {
            double s = 0.0;
            for (int l = 1; l <= rows; ++l)
                s += std::norm(beta[static_cast<size_t>(l - 1) * k_count + (k - 1)]);
            nk[k - 1] = s;
        }
        bool settled = true;
        if (!prev.empty()) {
            for (int k = 0; k < k_count; ++k)
                settled = settled
                          && (nk[k] - prev[k] <= rel_tol * std::max(nk[k], kFloor));
        } else {
            settled = false;
        }
        if (settled || 2 * rows > l_rows_cap) return nk;
        prev = nk;
        rows *= 2;
    }
}

SpectrumResult spectrum(const PhaseFunction& R, double t, int l_max,
                        double rel_tol, ExecutionPolicy policy, int l_max_cap) {
    if (l_max < 2) throw parameter_error("spectrum: l_max must be >= 2");
    constexpr double kFloor = 1e-12;
    SpectrumResult out;
    out.L = R.fundamental_length();

    int cur = l_max;
    for (;;) {
        auto tbl = build_node_table(R, t, cur, cur, policy);
        out.beta = bogolubov_matrix(tbl, cur, cur, policy);
        out.l_max = cur;
        out.n_k.assign(cur, 0.0);
        for (int k = 1; k <= cur; ++k) {
            double nk = 0.0;
            for (int l = 1; l <= cur; ++l)
                nk += std::norm(out.beta[static_cast<size_t>(l - 1) * cur + (k - 1)]);
            out.n_k[k - 1] = nk;
        }
        out.N_total = 0.0;
        for (double nk : out.n_k) out.N_total += nk;
        out.tail_estimate = out.N_total - submatrix_N(out.beta, cur, cur / 2);
        out.truncated = false;
        if (out.tail_estimate < rel_tol * std::max(out.N_total, kFloor)) break;
        if (2 * cur > l_max_cap) {
            out.truncated = true;
            break;
        }
        cur *= 2;
    }
    return out;
}

SumRuleCheck sum_rule_check(const SpectrumResult& spec, const EnergyReport& report) {
    const double omega = M_PI / spec.L;
    SumRuleCheck chk;
    chk.lhs = report.E_total;
    chk.rhs = -omega / 24.0;
    for (int k = 1; k <= spec.l_max; ++k)
        chk.rhs += spec.n_k[k - 1] * k * omega;
    chk.rel_err = std::abs(chk.lhs - chk.rhs)
                  / std::max(std::abs(chk.lhs), omega / 24.0);
    return chk;
}

} // namespace dce
