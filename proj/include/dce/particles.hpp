#pragma once

#include "dce/exec.hpp"
#include "dce/observables.hpp"
#include "dce/phase.hpp"

#include <complex>
#include <vector>

namespace dce {

// Shared quadrature nodes over one 2L window [t-L, t+L], sized so that the
// fastest integrand exp(-i(w_k R + w_l tau)) with k <= k_max, l <= l_max is
// resolved on every panel. R is sampled once; every matrix entry reuses it.
struct PhaseNodeTable {
    std::vector<double> tau;
    std::vector<double> weight;
    std::vector<double> R;
    double L = 0.0;
    double t_center = 0.0;
};

PhaseNodeTable build_node_table(const PhaseFunction& R, double t, int k_max,
                                int l_max,
                                ExecutionPolicy policy = ExecutionPolicy::Parallel);

// Single coefficients by direct oscillatory quadrature of the window
// integrals; result is independent of t once the cavity is static.
std::complex<double> bogolubov_direct(const PhaseFunction& R, double t, int k, int l);
std::complex<double> alpha_direct(const PhaseFunction& R, double t, int k, int l);

// Same coefficients from a prebuilt node table.
std::complex<double> bogolubov_from_table(const PhaseNodeTable& tbl, int k, int l);
std::complex<double> alpha_from_table(const PhaseNodeTable& tbl, int k, int l);

// Dense fills; row-major (k-1)*l_max + (l-1). Rows are independent and the
// inner sums run in a fixed order, so Serial and Parallel agree bitwise.
std::vector<std::complex<double>> bogolubov_matrix(const PhaseNodeTable& tbl,
                                                   int k_max, int l_max,
                                                   ExecutionPolicy policy);
std::vector<std::complex<double>> alpha_matrix(const PhaseNodeTable& tbl,
                                               int k_max, int l_max,
                                               ExecutionPolicy policy);

// Resonant-representation coefficient: per-piece integrals in the angle
// variable with the branch phase sum over the k pieces. Agrees with
// bogolubov_direct on the assembled phase function.
std::complex<double> bogolubov_resonant(const ResonantAnsatz& ansatz, int k, int l);

// n_k for k <= k_count only: sums |beta_{lk}|^2 over rows l, doubling the
// row truncation until the last octave contributes less than rel_tol of
// every requested mode (or the floor). Much cheaper than a full spectrum
// when only the low modes matter.
std::vector<double> photon_numbers(const PhaseFunction& R, double t, int k_count,
                                   double rel_tol = 1e-8,
                                   ExecutionPolicy policy = ExecutionPolicy::Parallel,
                                   int l_rows_cap = 1024);

struct SpectrumResult {
    std::vector<std::complex<double>> beta; // row-major, l_max x l_max
    std::vector<double> n_k;                // photon number per mode, 1..l_max
    double N_total = 0.0;
    int l_max = 0;
    double tail_estimate = 0.0;
    bool truncated = false; // l_max ceiling reached before the tail settled
    double L = 0.0;

    const std::complex<double>& at(int k, int l) const {
        return beta[static_cast<size_t>(k - 1) * l_max + (l - 1)];
    }
};

// Fills beta up to l_max, doubling until the last-octave contribution to
// N_total drops below rel_tol (or the absolute floor catches an empty
// spectrum). n_k = sum_l |beta_{lk}|^2.
SpectrumResult spectrum(const PhaseFunction& R, double t, int l_max = 32,
                        double rel_tol = 1e-6,
                        ExecutionPolicy policy = ExecutionPolicy::Parallel,
                        int l_max_cap = 512);

struct SumRuleCheck {
    double lhs = 0.0;     // E_total
    double rhs = 0.0;     // -omega/24 + sum_k n_k omega_k
    double rel_err = 0.0; // relative to max(|lhs|, omega/24)
};

SumRuleCheck sum_rule_check(const SpectrumResult& spec, const EnergyReport& report);

} // namespace dce
