#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "sdlab/errors.hpp"
#include "sdlab/spreading_chain.hpp"

using namespace sdlab;
using namespace sdlab::chain;

namespace {

// Direct normalised row from the unnormalised weights.
std::map<Cell, double> oracle_row(bool linear, double beta, Cell m, Cell m_max) {
    Cell lo, hi;
    if (linear) {
        lo = static_cast<Cell>(std::ceil(m / beta - 1e-12));
        hi = static_cast<Cell>(std::floor(beta * m + 1e-12));
    } else {
        lo = static_cast<Cell>(std::ceil(std::sqrt(static_cast<double>(m)) - 1e-12));
        hi = m * m;
    }
    lo = std::max<Cell>(lo, 1);
    hi = std::min(hi, m_max);
    std::map<Cell, double> row;
    double z = 0.0;
    for (Cell n = lo; n <= hi; ++n) {
        const double dn = static_cast<double>(n), dm = static_cast<double>(m);
        const double w = linear ? dm / (dn * dn) : (dm + dn) / (dn * dn * dn);
        row[n] = w;
        z += w;
    }
    for (auto& [n, p] : row) p /= z;
    return row;
}

}  // namespace

TEST_CASE("theta of the linear family") {
    CHECK(theta_linear(3.0) == doctest::Approx(3.0 * std::log(3.0) / 4.0).epsilon(1e-15));
    CHECK(theta_linear(7.0) == doctest::Approx(7.0 * std::log(7.0) / 24.0).epsilon(1e-15));
    CHECK(theta_linear(3.0) == doctest::Approx(0.823959).epsilon(1e-6));
    for (double b : {1.1, 2.0, 5.0, 50.0}) {
        CHECK(theta_linear(b) > 0.0);
        CHECK(theta_linear(b) < 1.0);
        CHECK(theta_linear(b) == doctest::Approx(2 * std::log(b) / (b - 1 / b)));
    }
    CHECK_THROWS_AS(theta_linear(1.0), InvalidParameterError);
}

TEST_CASE("supports") {
    const auto k = build_linear_kernel(3.0, 1000);
    CHECK(k.support(10) == std::pair<Cell, Cell>{4, 30});
    CHECK(k.support(1) == std::pair<Cell, Cell>{1, 3});
    CHECK(k.support(900) == std::pair<Cell, Cell>{300, 1000});
    const auto a = build_algebraic_kernel(1000);
    CHECK(a.support(10) == std::pair<Cell, Cell>{4, 100});
    CHECK(a.support(16) == std::pair<Cell, Cell>{4, 256});
    CHECK(a.support(100) == std::pair<Cell, Cell>{10, 1000});
    CHECK_THROWS_AS(k.support(0), InvalidParameterError);
    CHECK_THROWS_AS(k.support(1001), InvalidParameterError);
}

TEST_CASE("kernel construction limits") {
    CHECK_THROWS_AS(build_linear_kernel(1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_linear_kernel(3.0, 100), InvalidParameterError);
    const auto k = build_linear_kernel(3.0, 1000);
    CHECK(k.theta() == doctest::Approx(theta_linear(3.0)));
    CHECK(k.c0() == doctest::Approx(1.0 / (3.0 - 1.0 / 3.0)));
    CHECK(build_algebraic_kernel(1000).theta() == 0.0);
}

TEST_CASE("rows match the direct oracle") {
    const Cell M = 5000;
    const auto lin = build_linear_kernel(3.0, M);
    const auto alg = build_algebraic_kernel(M);
    for (Cell m : {1, 2, 7, 50, 333, 1000, 4000}) {
        for (const auto& [k, linear] : {std::pair{&lin, true}, std::pair{&alg, false}}) {
            const auto row = oracle_row(linear, 3.0, m, M);
            double total = 0.0, mean = 0.0;
            for (const auto& [n, p] : row) {
                CHECK(k->probability(m, n) == doctest::Approx(p).epsilon(1e-10));
                total += k->probability(m, n);
                mean += n * p;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(k->row_mean(m) == doctest::Approx(mean).epsilon(1e-10));
            const auto [lo, hi] = k->support(m);
            CHECK(k->probability(m, hi + 1 <= M ? hi + 1 : lo) >= 0.0);
            if (lo > 1) CHECK(k->probability(m, lo - 1) == 0.0);
        }
    }
}

TEST_CASE("partial moments and truncated mean") {
    const auto k = build_linear_kernel(3.0, 5000);
    const Cell m = 600;
    const auto row = oracle_row(true, 3.0, m, 5000);
    double mass = 0.0, first = 0.0;
    for (const auto& [n, p] : row) {
        if (n >= 250 && n <= 900) {
            mass += p;
            first += n * p;
        }
    }
    const auto pm = k.partial_moments(m, 250, 900);
    CHECK(pm.mass == doctest::Approx(mass).epsilon(1e-10));
    CHECK(pm.first == doctest::Approx(first).epsilon(1e-10));
    double below = 0.0;
    for (const auto& [n, p] : row) {
        if (n < 700.5) below += n * p;
    }
    CHECK(conditional_truncated_mean(k, m, 700.5) == doctest::Approx(below).epsilon(1e-10));
    CHECK(k.partial_moments(m, 5000, 6000).mass == 0.0);
}

TEST_CASE("power sums") {
    const auto k = build_linear_kernel(3.0, 2000);
    for (int p = 1; p <= 3; ++p) {
        double s = 0.0;
        for (Cell n = 17; n <= 1234; ++n) s += std::pow(static_cast<double>(n), -p);
        CHECK(k.power_sum(p, 17, 1234) == doctest::Approx(s).epsilon(1e-12));
    }
    CHECK(k.power_sum(2, 10, 9) == 0.0);
}

TEST_CASE("sampling follows the row law") {
    const auto k = build_linear_kernel(3.0, 1000);
    const auto a = build_algebraic_kernel(1000);
    Rng rng(1);
    for (const auto& [kern, linear, m] :
         {std::tuple{&k, true, Cell{20}}, std::tuple{&a, false, Cell{9}}}) {
        const auto row = oracle_row(linear, 3.0, m, 1000);
        std::map<Cell, int> counts;
        const int N = 200'000;
        for (int i = 0; i < N; ++i) ++counts[kern->sample_next(m, rng)];
        double chi = 0.0;
        int dof = -1;
        for (const auto& [n, p] : row) {
            if (p * N < 20) continue;
            const double e = p * N;
            chi += (counts[n] - e) * (counts[n] - e) / e;
            ++dof;
        }
        for (const auto& [n, c] : counts) CHECK(row.count(n) == 1);
        // Generous: mean dof, sd sqrt(2 dof).
        CHECK(chi < dof + 6 * std::sqrt(2.0 * dof));
    }
}

TEST_CASE("reference law proportional to m^-3") {
    const Cell M = 1000;
    const auto k = build_linear_kernel(3.0, M);
    double z = 0.0, first = 0.0;
    for (Cell n = 1; n <= M; ++n) z += std::pow(static_cast<double>(n), -3);
    for (Cell n = 1; n <= M; ++n) first += std::pow(static_cast<double>(n), -2);
    CHECK(k.stationary_probability(1) == doctest::Approx(1.0 / z));
    CHECK(k.stationary_probability(10) == doctest::Approx(1e-3 / z));
    CHECK(k.stationary_mean() == doctest::Approx(first / z).epsilon(1e-12));
    Rng rng(2);
    const int N = 200'000;
    int ones = 0, twos = 0;
    for (int i = 0; i < N; ++i) {
        const Cell c = sample_stationary_cell(k, rng);
        REQUIRE(c >= 1);
        REQUIRE(c <= M);
        ones += c == 1;
        twos += c == 2;
    }
    CHECK(std::abs(ones / double(N) - 1.0 / z) < 5 * std::sqrt(0.25 / N));
    CHECK(std::abs(twos / double(N) - 0.125 / z) < 5 * std::sqrt(0.25 / N));
}

TEST_CASE("trajectories respect the support and are reproducible") {
    const auto k = build_linear_kernel(3.0, 10'000);
    Rng a(9), b(9);
    const auto t1 = run_chain(k, 5000, 100, a);
    const auto t2 = run_chain(k, 5000, 100, b);
    REQUIRE(t1.size() == 5000);
    CHECK(t1 == t2);
    for (std::size_t i = 1; i < t1.size(); ++i) {
        const auto [lo, hi] = k.support(t1[i - 1]);
        REQUIRE(t1[i] >= lo);
        REQUIRE(t1[i] <= hi);
    }
    Rng c(10);
    CHECK(chain_step(k, 100, c) >= 34);
}

TEST_CASE("one-step conditional mean contracts by about theta") {
    const auto k = build_linear_kernel(3.0);
    for (Cell m : {1000, 10'000, 100'000}) {
        CHECK(k.row_mean(m) / m == doctest::Approx(k.theta()).epsilon(0.01));
    }
}
