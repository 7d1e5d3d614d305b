#include "sdlab/spreading_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdlab/errors.hpp"

namespace sdlab::chain {

double theta_linear(double beta) {
    if (!(beta > 1.0) || !std::isfinite(beta)) {
        throw InvalidParameterError("theta_linear: beta must be > 1");
    }
    // log1p keeps the beta -> 1+ limit accurate.
    const double eps = beta - 1.0;
    return 2.0 * std::log1p(eps) * beta / (eps * (beta + 1.0));
}

void SpreadingKernel::build_tables() {
    for (int p = 1; p <= 3; ++p) {
        auto& s = suffix_[p - 1];
        s.assign(static_cast<std::size_t>(m_max_) + 2, 0.0);
        // Smallest terms first, Kahan-compensated.
        double sum = 0.0;
        double comp = 0.0;
        for (Cell n = m_max_; n >= 1; --n) {
            const double term = std::pow(static_cast<double>(n), -p) - comp;
            const double t = sum + term;
            comp = (t - sum) - term;
            sum = t;
            s[static_cast<std::size_t>(n)] = sum;
        }
    }
}

double SpreadingKernel::power_sum(int p, Cell a, Cell b) const {
    a = std::max<Cell>(a, 1);
    b = std::min(b, m_max_);
    if (a > b) return 0.0;
    const auto& s = suffix_[p - 1];
    return s[static_cast<std::size_t>(a)] - s[static_cast<std::size_t>(b) + 1];
}

std::pair<Cell, Cell> SpreadingKernel::support(Cell m) const {
    if (m < 1 || m > m_max_) {
        throw InvalidParameterError("SpreadingKernel: cell " + std::to_string(m) +
                                    " outside [1, m_max]");
    }
    Cell lo, hi;
    if (family_ == KernelFamily::linear) {
        const double md = static_cast<double>(m);
        lo = static_cast<Cell>(std::ceil(md / beta_ - 1e-12));
        hi = static_cast<Cell>(std::floor(beta_ * md + 1e-9));
    } else {
        lo = static_cast<Cell>(std::ceil(std::sqrt(static_cast<double>(m)) - 1e-12));
        hi = m > 1'000'000'000 ? m_max_ : m * m;
    }
    lo = std::max<Cell>(lo, 1);
    hi = std::min(hi, m_max_);
    return {lo, hi};
}

double SpreadingKernel::weight(Cell m, Cell n) const {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    if (family_ == KernelFamily::linear) return c0_ * md / (nd * nd);
    return (md + nd) / (nd * nd * nd);
}

SpreadingKernel::Moments SpreadingKernel::partial_moments(Cell m, Cell lo, Cell hi) const {
    const auto [a, b] = support(m);
    const Cell l = std::max(lo, a);
    const Cell h = std::min(hi, b);
    Moments out;
    if (l > h) return out;
    if (family_ == KernelFamily::linear) {
        const double z = power_sum(2, a, b);
        out.mass = power_sum(2, l, h) / z;
        out.first = power_sum(1, l, h) / z;
    } else {
        const double md = static_cast<double>(m);
        const double z = md * power_sum(3, a, b) + power_sum(2, a, b);
        out.mass = (md * power_sum(3, l, h) + power_sum(2, l, h)) / z;
        out.first = (md * power_sum(2, l, h) + power_sum(1, l, h)) / z;
    }
    return out;
}

double SpreadingKernel::probability(Cell m, Cell n) const {
    const auto [a, b] = support(m);
    if (n < a || n > b) return 0.0;
    return partial_moments(m, n, n).mass;
}

double SpreadingKernel::row_mean(Cell m) const {
    const auto [a, b] = support(m);
    return partial_moments(m, a, b).first;
}

Cell SpreadingKernel::invert(int p, Cell a, Cell b, double target) const {
    const auto& s = suffix_[p - 1];
    // sum_{j=a}^{n} j^-p = s[a] - s[n+1] >= target  <=>  s[n+1] <= s[a] - target.
    const double bound = s[static_cast<std::size_t>(a)] - target;
    Cell lo = a;
    Cell hi = b;
    while (lo < hi) {
        const Cell mid = lo + (hi - lo) / 2;
        if (s[static_cast<std::size_t>(mid) + 1] <= bound) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

Cell SpreadingKernel::sample_next(Cell m, Rng& rng) const {
    const auto [a, b] = support(m);
    if (family_ == KernelFamily::linear) {
        return invert(2, a, b, rng.uniform_open() * power_sum(2, a, b));
    }
    // (m+n)/n^3 = m n^-3 + n^-2: pick a component, then invert it.
    const double md = static_cast<double>(m);
    const double w3 = md * power_sum(3, a, b);
    const double w2 = power_sum(2, a, b);
    if (rng.uniform() * (w3 + w2) < w3) {
        return invert(3, a, b, rng.uniform_open() * power_sum(3, a, b));
    }
    return invert(2, a, b, rng.uniform_open() * w2);
}

double SpreadingKernel::stationary_probability(Cell m) const {
    if (m < 1 || m > m_max_) return 0.0;
    return std::pow(static_cast<double>(m), -3.0) / suffix_[2][1];
}

double SpreadingKernel::stationary_mean() const { return suffix_[1][1] / suffix_[2][1]; }

Cell SpreadingKernel::sample_stationary(Rng& rng) const {
    return invert(3, 1, m_max_, rng.uniform_open() * suffix_[2][1]);
}

SpreadingKernel build_linear_kernel(double beta, Cell m_max) {
    const double theta = theta_linear(beta);
    if (!(theta < 1.0)) throw InvalidParameterError("build_linear_kernel: theta(beta) >= 1");
    if (m_max < 1000) throw InvalidParameterError("build_linear_kernel: m_max must be >= 1000");
    SpreadingKernel k;
    k.family_ = KernelFamily::linear;
    k.beta_ = beta;
    k.c0_ = 1.0 / (beta - 1.0 / beta);
    k.theta_ = theta;
    k.m_max_ = m_max;
    k.build_tables();
    return k;
}

SpreadingKernel build_algebraic_kernel(Cell m_max) {
    if (m_max < 1000) throw InvalidParameterError("build_algebraic_kernel: m_max must be >= 1000");
    SpreadingKernel k;
    k.family_ = KernelFamily::algebraic;
    k.theta_ = 0.0;
    k.m_max_ = m_max;
    k.build_tables();
    return k;
}

Cell sample_stationary_cell(const SpreadingKernel& kernel, Rng& rng) {
    return kernel.sample_stationary(rng);
}

Cell chain_step(const SpreadingKernel& kernel, Cell m, Rng& rng) {
    return kernel.sample_next(m, rng);
}

double conditional_truncated_mean(const SpreadingKernel& kernel, Cell m, double c) {
    if (!(c > 0.0)) throw InvalidParameterError("conditional_truncated_mean: c must be > 0");
    const Cell top = static_cast<Cell>(std::ceil(c)) - 1;  // n < c
    return kernel.partial_moments(m, 1, top).first;
}

std::vector<Cell> run_chain(const SpreadingKernel& kernel, std::size_t n, std::size_t burn_in,
                            Rng& rng) {
    Cell m = kernel.sample_stationary(rng);
    for (std::size_t i = 0; i < burn_in; ++i) m = kernel.sample_next(m, rng);
    std::vector<Cell> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        m = kernel.sample_next(m, rng);
        out[i] = m;
    }
    return out;
}

}  // namespace sdlab::chain
