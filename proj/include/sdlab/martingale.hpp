#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdlab/spreading_chain.hpp"

namespace sdlab::martingale {

// c_n = sqrt(n * max(1, ln ln max(n, 3))).
double truncation_level(double n);

// Doob decomposition of the truncated, centred chain along one trajectory
// m_0, m_1, ..., m_n (n + 1 states; m_0 supplies the initial condition).
//   X_k = (m_k - a) 1{|m_k - a| < c}            k = 0..n
//   Y_k = E(X_k | m_{k-1}), Z_k = X_k - Y_k     k = 1..n
//   E_k = Y_{k+1} - theta X_k                   k = 0..n-1
// Index 0 of Y and Z is unused (0).
struct DoobDecomposition {
    std::vector<double> X, Y, Z, E;
    double theta = 0.0;
    double center = 0.0;
    double c = 0.0;
    std::size_t n() const { return X.empty() ? 0 : X.size() - 1; }

    double S() const;  // sum_{k=1}^n X_k
    double M() const;  // sum_{k=1}^n Z_k
    // (1-theta) S - [M + theta (X_0 - X_n) + sum_{k<n} E_k]; zero up to rounding.
    double identity_residual() const;
    // max_k |X_k - Z_k - Y_k|.
    double reconstruction_error() const;
};

DoobDecomposition doob_decompose_chain(const chain::SpreadingKernel& kernel,
                                       std::span<const chain::Cell> trajectory, double c,
                                       double center);

// Per-run sums that feed the McLeish diagnostics; pooled across replicas by
// summation.
struct McLeishSums {
    double max_z2 = 0.0;
    double sum_z2 = 0.0;
    std::size_t n = 0;
};
McLeishSums mcleish_sums(const DoobDecomposition& d);

struct McLeishDiagnostics {
    double max_term = 0.0;     // (i) max_k Z_k^2 / (n H(c_n))
    double sum_squares = 0.0;  // (ii) sum_k Z_k^2 / (n H(c_n)), limit 1 - theta^2
    double limit = 0.0;        // 1 - theta^2
};
McLeishDiagnostics mcleish_diagnostics(const DoobDecomposition& d, double H_cn);
// Replica average of (i) and (ii).
McLeishDiagnostics mcleish_diagnostics(const std::vector<McLeishSums>& runs, double theta,
                                       double H_cn);

// Within-cell centring proxy for xi along a billiard excursion series:
// xi_k = f_tilde_k - mean(f_tilde | cell of R_k). Cells are exact R values
// below 50 and 10% geometric bins above.
std::vector<double> xi_residual(std::span<const double> f_tilde,
                                std::span<const std::uint64_t> R);

}  // namespace sdlab::martingale
