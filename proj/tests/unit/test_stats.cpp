#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "sdlab/errors.hpp"
#include "sdlab/sources.hpp"
#include "sdlab/stats.hpp"

using namespace sdlab;
using namespace sdlab::stats;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = sources::standard_normal(rng);
    return v;
}

}  // namespace

TEST_CASE("truncated variance") {
    const std::vector<double> x{-3, -1, 0, 1, 100};
    // Kept: -1, 0, 1 and zeros for -3, 100 at t = 2.
    CHECK(truncated_variance(x, 2.0) == doctest::Approx(2.0 / 5.0));
    // Everything kept: plain population variance.
    const double mean = 97.0 / 5.0;
    double v = 0.0;
    for (double a : x) v += (a - mean) * (a - mean);
    CHECK(truncated_variance(x, 1e9) == doctest::Approx(v / 5.0));
}

TEST_CASE("moments and quantiles") {
    const std::vector<double> x{1, 2, 3, 4};
    const auto m = moments(x);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.skewness == doctest::Approx(0.0));
    CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(x, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(x, 1.0) == doctest::Approx(4.0));
    CHECK(median({5, 1, 3}) == doctest::Approx(3.0));
    const auto z = normals(200'000, 1);
    const auto mz = moments(z);
    CHECK(std::abs(mz.mean) < 0.01);
    CHECK(mz.variance == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(mz.skewness) < 0.03);
    CHECK(mz.kurtosis == doctest::Approx(3.0).epsilon(0.03));
    CHECK(robust_variance(z) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("count histogram") {
    CountHistogram h(100);
    h.add(3);
    h.add(5, 4);
    h.add(250);
    CHECK(h.total() == 6);
    CHECK(h.at_least(1) == 6);
    CHECK(h.at_least(4) == 5);
    CHECK(h.at_least(6) == 1);
    CHECK(h.at_least(100) == 1);
    CHECK(h.overflow() == 1);
    CHECK(h.max_value() == 250);
    CountHistogram g(100);
    g.add(7);
    h.merge(g);
    CHECK(h.total() == 7);
    CHECK(h.at_least(6) == 2);
}

TEST_CASE("log grid") {
    const auto g = log_grid(50, 500, 16);
    CHECK(g.front() == 50);
    CHECK(g.back() == 500);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    // Rounding collapses duplicates.
    CHECK(log_grid(1, 3, 20).size() <= 3);
}

TEST_CASE("tail constant of a synthetic inverse-square law") {
    // X = floor(U^{-1/2}) has P(X >= n) = 1/n^2 exactly.
    Rng rng(2);
    CountHistogram h;
    for (int i = 0; i < 2'000'000; ++i) {
        h.add(static_cast<std::uint64_t>(std::floor(1.0 / std::sqrt(rng.uniform_open()))));
    }
    Rng boot(3);
    const auto est = tail_constant(h, log_grid(10, 100, 8), &boot);
    CHECK(est.plateau == doctest::Approx(1.0).epsilon(0.05));
    CHECK(est.ci_lo <= est.plateau);
    CHECK(est.ci_hi >= est.plateau);
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        CHECK(est.n2prob[i] == doctest::Approx(est.grid[i] * est.grid[i] * est.prob[i]));
    }
}

TEST_CASE("tail constant edge cases") {
    const std::vector<double> bounded(10'000, 3.0);
    CHECK(tail_constant(bounded, log_grid(50, 500, 8)).plateau == 0.0);
    std::vector<double> thin(10'000, 1.0);
    thin[0] = 600;
    CHECK_THROWS_AS(tail_constant(thin, log_grid(50, 500, 8)), InsufficientTailError);
}

TEST_CASE("normal cdf and KS distance") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
    // Exact mid-quantiles: D = 1/(2N).
    const boost::math::normal_distribution<> nd;
    const int N = 1000;
    std::vector<double> q(N);
    for (int i = 0; i < N; ++i) q[i] = boost::math::quantile(nd, (i + 0.5) / N);
    CHECK(ks_distance(q) == doctest::Approx(0.5 / N).epsilon(1e-6));
    std::vector<double> shifted(q);
    for (auto& x : shifted) x += 1.0;
    CHECK(ks_distance(shifted) == doctest::Approx(normal_cdf(0.5) - normal_cdf(-0.5)).epsilon(0.01));
}

TEST_CASE("chi-square uniformity") {
    const auto even = chi_square_uniform({100, 100, 100, 100});
    CHECK(even.statistic == 0.0);
    CHECK(even.dof == 3);
    CHECK(even.p_value == doctest::Approx(1.0));
    const auto skew = chi_square_uniform({200, 100, 100, 0});
    CHECK(skew.statistic == doctest::Approx(200.0));
    CHECK(skew.p_value < 1e-10);
}

TEST_CASE("autocovariance, correlation, regression") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto ac = autocovariance(x, {0, 1});
    CHECK(ac[0] == doctest::Approx(2.0));
    // Centred lag-1 products over N = 5.
    CHECK(ac[1] == doctest::Approx(((-2) * (-1) + (-1) * 0 + 0 * 1 + 1 * 2) / 5.0));
    const std::vector<double> y{3, 5, 7, 9, 11};
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
    const auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("transition estimate") {
    std::vector<TransitionPair> pairs{
        {10, 5, 1}, {10, 15, 1}, {11, 15, 2}, {30, 5, 1},
    };
    const auto est = transition_estimate(pairs, {9, 20, 40, 60}, {1, 10, 20},
                                         [](double, double lo, double hi) { return (hi - lo) / 19; });
    REQUIRE(est.empty_m_bins.size() == 1);
    CHECK(est.empty_m_bins[0].first == 40);
    // m-bin [9, 20): weights 1 in n-bin 0, 3 in n-bin 1.
    REQUIRE(est.cells.size() == 4);
    CHECK(est.cells[0].p_hat == doctest::Approx(0.25));
    CHECK(est.cells[1].p_hat == doctest::Approx(0.75));
    CHECK(est.cells[1].count == 2);
    CHECK(est.cells[0].model_p == doctest::Approx(9.0 / 19));
    CHECK(est.cells[2].p_hat == doctest::Approx(1.0));
    CHECK(est.cells[3].p_hat == doctest::Approx(0.0));
    const auto bins = relative_bins(100, 300, 0.2);
    CHECK(bins.front() == 100);
    CHECK(bins.back() >= 300);
    CHECK(bins[1] == doctest::Approx(120));
    CHECK_THROWS_AS(relative_bins(0, 10), InvalidParameterError);
}
