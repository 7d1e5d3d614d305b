#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdlab/observables.hpp"

using namespace sdlab;
using namespace sdlab::observables;
using geometry::kPi;

namespace {

struct Stadium {
    geometry::BilliardTable t = geometry::build_stadium(1.0);
    induced::ReducedSpace spec = induced::default_reduced_space(t);
    std::vector<Interval> A = induced::channel_set(t, spec);
};

}  // namespace

TEST_CASE("simpson is exact on cubics and accurate on smooth integrands") {
    CHECK(simpson([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0, 2) ==
          doctest::Approx(4.0 - 4.0 + 2.0));
    CHECK(simpson([](double x) { return std::sin(x); }, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-12));
    // Odd panel counts are rounded up.
    CHECK(simpson([](double x) { return x * x; }, 0.0, 1.0, 3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("constant observable induces the return time") {
    Stadium s;
    const auto f = constant(1.0);
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const auto x = induced::sample_mu(s.t, s.spec, rng);
        try {
            const auto v = induced_value(s.t, s.spec, f, x.x);
            CHECK(v.f_tilde == doctest::Approx(static_cast<double>(v.sample.R)));
        } catch (const std::runtime_error&) {
        }
    }
}

TEST_CASE("return indicator induces R minus its mean") {
    Stadium s;
    const double mu = 2.0 / (kPi + 1.0);
    const auto f = return_indicator(mu);
    CHECK(f({0.1, 0.0}, true) == doctest::Approx(1.0 - 1.0 / mu));
    CHECK(f({0.1, 0.0}, false) == doctest::Approx(1.0));
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto x = induced::sample_mu(s.t, s.spec, rng);
        try {
            const auto v = induced_value(s.t, s.spec, f, x.x);
            CHECK(v.f_tilde == doctest::Approx(static_cast<double>(v.sample.R) - 1.0 / mu));
        } catch (const std::runtime_error&) {
        }
    }
    CHECK_THROWS_AS(return_indicator(0.0), InvalidParameterError);
    CHECK_THROWS_AS(return_indicator(1.5), InvalidParameterError);
}

TEST_CASE("channel integrals of the catalog against closed forms") {
    Stadium s;
    // Integer periods integrate to zero over each flat.
    for (int p = 1; p <= 4; ++p) {
        CHECK(std::abs(channel_integral(s.t, s.spec, sinusoid_on_channels(s.A, 1.7, p))) < 1e-12);
    }
    // A half sine on each interval integrates to 2 len / pi.
    const double amp = 0.8;
    double expect = 0.0;
    for (const auto& a : s.A) expect += amp * 2.0 * a.length() / kPi;
    CHECK(channel_integral(s.t, s.spec, bump_on_channels(s.A, amp, 0.1)) ==
          doctest::Approx(expect).epsilon(1e-10));
    CHECK(channel_integral(s.t, s.spec, constant(3.0)) == doctest::Approx(3.0 * 2.0));
    CHECK(channel_average_stadium(constant(3.0), 1.0) == doctest::Approx(3.0));
    CHECK(channel_average(s.t, s.spec, bump_on_channels(s.A, amp, 0.1)) ==
          doctest::Approx(2.0 * amp / kPi).epsilon(1e-10));
}

TEST_CASE("shaped observables vanish off the channel set") {
    Stadium s;
    const auto f = bump_on_channels(s.A, 1.0, 0.1);
    const auto g = sinusoid_on_channels(s.A, 1.0, 1);
    const double on_arc = 1.0 + kPi / 2;  // middle of the right arc
    CHECK(f({on_arc, 0.0}, false) == 0.0);
    CHECK(g({on_arc, 0.0}, false) == 0.0);
    CHECK(f({0.5, 0.0}, false) == doctest::Approx(1.0));
    CHECK(f({0.5, 0.1}, false) == doctest::Approx(std::exp(-0.5)));
    CHECK_THROWS_AS(bump_on_channels(s.A, 1.0, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(sinusoid_on_channels(s.A, 1.0, 0), InvalidParameterError);
    CHECK_THROWS_AS(sinusoid_on_channels({}, 1.0, 1), InvalidParameterError);
}

TEST_CASE("combine is pointwise linear") {
    Stadium s;
    const auto a = constant(2.0);
    const auto b = bump_on_channels(s.A, 1.0, 0.2);
    const auto mu = 0.4;
    const auto c = combine({{0.5, a}, {-3.0, b}, {2.0, return_indicator(mu)}});
    for (double r : {0.1, 0.7, 2.0, 4.5}) {
        for (bool m : {false, true}) {
            const PhaseVec x{r, 0.05};
            CHECK(c(x, m) == doctest::Approx(0.5 * a(x, m) - 3.0 * b(x, m) +
                                             2.0 * return_indicator(mu)(x, m)));
        }
    }
}

TEST_CASE("channel averages and J_f") {
    Stadium s;
    const auto f = constant(2.5);
    const auto avg = channel_averages(s.t, s.spec, f);
    REQUIRE(avg.a.size() == s.spec.label_count);
    CHECK(avg.I_f() == doctest::Approx(2.5));
    ReturnSample rs;
    rs.R = 40;
    rs.k = 1;
    CHECK(J_f_value(avg, rs) == doctest::Approx(100.0));
    rs.k = 99;
    CHECK_THROWS_AS(J_f_value(avg, rs), InvalidParameterError);
}

TEST_CASE("lorentz channel averages") {
    const auto t = geometry::build_lorentz(2.0, 2.0, {{{1.0, 1.0}, 0.5}, {{0.0, 0.0}, 0.5}, {{2.0, 0.0}, 0.5}});
    const auto spec = induced::default_reduced_space(t);
    const auto avg = channel_averages_lorentz(constant(1.5), spec.channels);
    REQUIRE(avg.a.size() == 1);
    CHECK(avg.a[0] == doctest::Approx(1.5));
    CHECK_THROWS_AS(channel_averages_lorentz(constant(1.0), {}), InvalidParameterError);
}

TEST_CASE("holder spot check stays quiet for smooth observables") {
    Stadium s;
    Rng rng(3);
    const auto h = holder_spot_check(s.t, s.spec, bump_on_channels(s.A, 1.0, 0.2), rng, 500);
    CHECK_FALSE(h.warn);
    CHECK(h.sup_norm == doctest::Approx(1.0).epsilon(0.05));
}
