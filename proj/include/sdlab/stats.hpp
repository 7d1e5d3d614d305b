#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdlab/rng.hpp"

namespace sdlab::stats {

// Var(X 1{|X| < t}).
double truncated_variance(std::span<const double> samples, double t);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skewness = 0.0;
    double kurtosis = 0.0;  // 3 for a normal law
};
Moments moments(std::span<const double> values);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double p);
// (IQR / 1.349)^2: the variance of a normal law with the same IQR.
double robust_variance(std::vector<double> values);

// Counts of a positive integer variable, exact up to `cap`, pooled above.
class CountHistogram {
public:
    explicit CountHistogram(std::uint64_t cap = 1'000'000) : counts_(cap + 1, 0) {}
    void add(std::uint64_t value, std::uint64_t times = 1);
    void merge(const CountHistogram& other);
    std::uint64_t total() const { return total_; }
    std::uint64_t cap() const { return counts_.size() - 1; }
    // #{X >= n}. Exact for n <= cap.
    std::uint64_t at_least(std::uint64_t n) const;
    std::uint64_t max_value() const { return max_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t overflow() const { return overflow_; }

private:
    std::vector<std::uint64_t> counts_;  // counts_[cap] also holds the overflow
    std::uint64_t overflow_ = 0;
    std::uint64_t total_ = 0;
    std::uint64_t max_ = 0;
};

struct TailEstimate {
    std::vector<double> grid;
    std::vector<std::uint64_t> counts;  // #{X >= n}
    std::vector<double> prob;           // P(X >= n)
    std::vector<double> n2prob;         // n^2 P(X >= n)
    std::vector<bool> used;             // counts >= min_count
    double plateau = 0.0;               // median of n2prob over used points
    double ci_lo = 0.0;                 // bootstrap percentile interval
    double ci_hi = 0.0;
    // Least-squares fit n2prob ~ c + d/n over used points (diagnostic).
    double extrapolated = 0.0;
    double slope = 0.0;
};

// Geometric grid of `points` values between lo and hi.
std::vector<double> log_grid(double lo, double hi, int points);

// Plateau of n^2 P(X >= n) over grid points with at least min_count
// exceedances. Samples that never reach the grid give plateau 0; a grid that
// is reached but too thinly populated throws InsufficientTailError.
TailEstimate tail_constant(const CountHistogram& hist, const std::vector<double>& grid,
                           Rng* bootstrap_rng = nullptr, int bootstrap = 200,
                           std::uint64_t min_count = 100);
TailEstimate tail_constant(std::span<const double> samples, const std::vector<double>& grid,
                           Rng* bootstrap_rng = nullptr, int bootstrap = 200,
                           std::uint64_t min_count = 100);

// Standard normal CDF.
double normal_cdf(double x);
// sup |F_n - Phi|.
double ks_distance(std::vector<double> values);

// Pearson chi-square test of equal cell probabilities.
struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};
ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& cells);

// Biased (1/N) autocovariances at the requested lags.
std::vector<double> autocovariance(std::span<const double> series, const std::vector<int>& lags);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

// Least squares y = a + b x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Conditional frequencies of n given m over (m-bin, n-bin) cells, with
// optional importance weights.
struct TransitionPair {
    double m = 0.0;
    double n = 0.0;
    double weight = 1.0;
};
struct TransitionCell {
    double m_lo = 0.0, m_hi = 0.0;  // [m_lo, m_hi)
    double n_lo = 0.0, n_hi = 0.0;  // [n_lo, n_hi)
    double p_hat = 0.0;
    double stderr_ = 0.0;
    double model_p = 0.0;   // weighted mean over the bin of the model mass of the n-bin
    std::uint64_t count = 0;
};
struct TransitionEstimate {
    std::vector<TransitionCell> cells;
    std::vector<std::pair<double, double>> empty_m_bins;
};
// `model(m, n_lo, n_hi)` returns the model probability of n in [n_lo, n_hi)
// given m; pass an empty function to skip it.
TransitionEstimate transition_estimate(
    const std::vector<TransitionPair>& pairs, const std::vector<double>& m_edges,
    const std::vector<double>& n_edges,
    const std::function<double(double, double, double)>& model = {});

// Geometric m-bins of relative width `width` starting at lo and covering hi.
std::vector<double> relative_bins(double lo, double hi, double width = 0.2);

}  // namespace sdlab::stats
