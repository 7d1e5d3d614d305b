#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sdlab/rng.hpp"

namespace sdlab::chain {

using Cell = std::int64_t;

inline constexpr Cell kDefaultMaxCell = 1'000'000;

// 2 ln(beta) / (beta - 1/beta), beta > 1.
double theta_linear(double beta);

enum class KernelFamily { linear, algebraic };

// Transition law on cells 1..m_max.
//   linear(beta): p(n|m) proportional to m/n^2 on [ceil(m/beta), min(floor(beta m), m_max)]
//   algebraic:    p(n|m) proportional to (m+n)/n^3 on [ceil(sqrt m), min(m^2, m_max)]
// Stationary reference law pi(m) proportional to m^-3 on [1, m_max].
//
// All sums are read off suffix tables S_p(k) = sum_{n=k}^{m_max} n^-p,
// p = 1, 2, 3, built once with compensated summation, so every row
// normalisation, mean and truncated moment is O(1) and sampling is an
// O(log m_max) inverse-CDF search.
class SpreadingKernel {
public:
    KernelFamily family() const { return family_; }
    double beta() const { return beta_; }
    Cell m_max() const { return m_max_; }
    // Leading coefficient 1/(beta - 1/beta) of the linear kernel.
    double c0() const { return c0_; }
    // theta_linear(beta) for the linear family, 0 for the algebraic one.
    double theta() const { return theta_; }

    std::pair<Cell, Cell> support(Cell m) const;
    // Leading-term weight before normalisation: c0 m/n^2 or (m+n)/n^3.
    double weight(Cell m, Cell n) const;
    double probability(Cell m, Cell n) const;

    struct Moments {
        double mass = 0.0;   // sum p(n|m)
        double first = 0.0;  // sum n p(n|m)
    };
    // Partial moments of row m over n in [lo, hi] (clipped to the support).
    Moments partial_moments(Cell m, Cell lo, Cell hi) const;
    double row_mean(Cell m) const;

    Cell sample_next(Cell m, Rng& rng) const;

    double stationary_probability(Cell m) const;
    double stationary_mean() const;
    Cell sample_stationary(Rng& rng) const;

    // sum_{n=a}^{b} n^-p for p in {1, 2, 3}; 0 when a > b.
    double power_sum(int p, Cell a, Cell b) const;

    friend SpreadingKernel build_linear_kernel(double beta, Cell m_max);
    friend SpreadingKernel build_algebraic_kernel(Cell m_max);

private:
    void build_tables();
    // Smallest n in [a, b] with sum_{j=a}^{n} j^-p >= target.
    Cell invert(int p, Cell a, Cell b, double target) const;

    KernelFamily family_ = KernelFamily::linear;
    double beta_ = 0.0;
    double c0_ = 0.0;
    double theta_ = 0.0;
    Cell m_max_ = 0;
    std::vector<double> suffix_[3];  // suffix_[p-1][k], k in [1, m_max+1]
};

SpreadingKernel build_linear_kernel(double beta, Cell m_max = kDefaultMaxCell);
SpreadingKernel build_algebraic_kernel(Cell m_max = kDefaultMaxCell);

Cell sample_stationary_cell(const SpreadingKernel& kernel, Rng& rng);
Cell chain_step(const SpreadingKernel& kernel, Cell m, Rng& rng);

// sum_{n < c} n p(n|m).
double conditional_truncated_mean(const SpreadingKernel& kernel, Cell m, double c);

// m_0 ~ pi, then `burn_in` steps discarded, then n recorded states.
std::vector<Cell> run_chain(const SpreadingKernel& kernel, std::size_t n, std::size_t burn_in,
                            Rng& rng);

}  // namespace sdlab::chain
