#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdlab/induced.hpp"

using namespace sdlab;
using namespace sdlab::induced;
using geometry::kPi;

namespace {

const std::vector<geometry::Disk> kCase1{{{1.0, 1.0}, 0.5}, {{0.0, 0.0}, 0.5}, {{2.0, 0.0}, 0.5}};

// Membership in M from scratch: focusing piece, predecessor on another piece.
bool oracle_in_M(const geometry::BilliardTable& t, PhaseVec x) {
    const auto piece = t.piece_at(x.r);
    if (t.piece(piece).curvature != geometry::Curvature::focusing) return false;
    return geometry::billiard_map_inverse(t, x).piece != piece;
}

}  // namespace

TEST_CASE("stadium channel set is the two flats") {
    const double l = 1.3;
    const auto t = geometry::build_stadium(l);
    const auto spec = default_reduced_space(t);
    const auto A = channel_set(t, spec);
    REQUIRE(A.size() == 2);
    CHECK(A[0].lo == doctest::Approx(0.0));
    CHECK(A[0].hi == doctest::Approx(l));
    CHECK(A[1].lo == doctest::Approx(kPi + l));
    CHECK(A[1].hi == doctest::Approx(kPi + 2 * l));
    CHECK(spec.label_count == 4);
}

TEST_CASE("drivebelt channel set on the major arc") {
    const double t0 = 7 * kPi / 6;
    const auto t = geometry::build_drivebelt(t0, kPi / 6, 1.0);
    const auto spec = default_reduced_space(t);
    const auto A = channel_set(t, spec);
    double len = 0.0;
    for (const auto& a : A) len += a.length();
    CHECK(len == doctest::Approx(2 * (t0 - kPi)));
    CHECK_THROWS_AS(measure_M_closed_form(t, spec), InvalidParameterError);
}

TEST_CASE("stadium measure of M: closed form against an independent count") {
    const double l = 1.0;
    const auto t = geometry::build_stadium(l);
    const auto spec = default_reduced_space(t);
    CHECK(measure_M_closed_form(t, spec) == doctest::Approx(2.0 / (kPi + l)).epsilon(1e-14));
    Rng rng(1);
    const int N = 100'000;
    int hits = 0, used = 0;
    for (int i = 0; i < N; ++i) {
        const auto x = geometry::sample_collision_measure(t, rng);
        try {
            hits += oracle_in_M(t, x) ? 1 : 0;
            ++used;
        } catch (const std::runtime_error&) {
        }
    }
    const double p = static_cast<double>(hits) / used;
    const double se = std::sqrt(p * (1 - p) / used);
    CHECK(std::abs(p - 2.0 / (kPi + l)) < 4 * se);
}

TEST_CASE("predecessor-free membership agrees with the oracle") {
    const auto t = geometry::build_stadium(1.0);
    const auto spec = default_reduced_space(t);
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const auto x = geometry::sample_collision_measure(t, rng);
        try {
            CHECK(in_M(t, spec, x) == oracle_in_M(t, x));
        } catch (const std::runtime_error&) {
        }
    }
}

TEST_CASE("lorentz case I channel detection and measure") {
    const auto t = geometry::build_lorentz(2.0, 2.0, kCase1);
    const auto spec = default_reduced_space(t);
    REQUIRE(spec.channels.size() == 1);
    const auto& c = spec.channels[0];
    CHECK(c.flight_length == doctest::Approx(2.0));
    REQUIRE(c.arcs.size() == 2);
    CHECK(c.arcs[0].length() == doctest::Approx(0.5));
    CHECK(c.arcs[1].length() == doctest::Approx(0.5));
    // |dB| / |dD|: a full circle and two quarter circles of radius 1/2;
    // the walls lose 1/2 at each of the four cut ends.
    const double dB = kPi + 2 * (kPi / 4);
    const double dD = dB + 8.0 - 4 * 0.5;
    CHECK(t.perimeter() == doctest::Approx(dD));
    CHECK(measure_M_closed_form(t, spec) == doctest::Approx(dB / dD));
}

TEST_CASE("return map basics on the stadium") {
    const auto t = geometry::build_stadium(1.0);
    const auto spec = default_reduced_space(t);
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto x = sample_mu(t, spec, rng);
        CHECK(in_M(t, spec, x.x));
        try {
            const auto s = return_map(t, spec, x.x);
            CHECK(s.R >= 1);
            CHECK(s.flat_hits <= s.R - 1);
            CHECK(in_M(spec, s.end_piece, t.piece_at(geometry::billiard_map_inverse(t, s.end).x.r)));
            CHECK(s.k < spec.label_count);
        } catch (const TangencyError&) {
        } catch (const CornerError&) {
        }
    }
}

TEST_CASE("near-vertical launch gives a long bouncing excursion") {
    const double l = 1.0;
    const auto t = geometry::build_stadium(l);
    const auto spec = default_reduced_space(t);
    // Leave the right arc close to its bottom end, almost straight up: the
    // orbit bounces between the flats and drifts slowly.
    const geometry::PhaseVec x{l + 0.02, 0.0};
    REQUIRE(t.piece_at(x.r) == 1);
    const auto s = return_map(t, spec, x);
    CHECK(s.R > 1);
    // Iterates between the two arcs are on the flats.
    CHECK(s.flat_hits == s.R - 1);
}

TEST_CASE("iteration cap") {
    const auto t = geometry::build_stadium(1.0);
    auto spec = default_reduced_space(t);
    spec.iteration_cap = 1;
    Rng rng(4);
    bool thrown = false;
    for (int i = 0; i < 200 && !thrown; ++i) {
        const auto x = sample_mu(t, spec, rng);
        try {
            (void)return_map(t, spec, x.x);
        } catch (const IterationCapError& e) {
            CHECK(e.cap() == 1);
            thrown = true;
        } catch (const std::runtime_error&) {
        }
    }
    CHECK(thrown);
}

TEST_CASE("Kac: mean return time under mu") {
    const double l = 1.0;
    const auto t = geometry::build_stadium(l);
    const auto spec = default_reduced_space(t);
    Rng rng(5);
    std::vector<ReturnSample> samples;
    while (samples.size() < 50'000) {
        try {
            samples.push_back(return_map(t, spec, sample_mu(t, spec, rng).x));
        } catch (const std::runtime_error&) {
        }
    }
    const auto k = kac_check(samples, 2.0 / (kPi + l));
    CHECK(k.predicted_mean == doctest::Approx((kPi + l) / 2));
    CHECK(std::abs(k.relative_error()) < 0.04);
    CHECK(mean_return_time_kac(0.25) == doctest::Approx(4.0));
}

TEST_CASE("band measure closed form") {
    const auto t = geometry::build_stadium(1.0);
    const auto spec = default_reduced_space(t);
    const auto A = channel_set(t, spec);
    const double delta = 0.02;
    // |A| * int_{|sin phi| < delta} cos phi dphi / (2 |dD|) = |A| delta / |dD|.
    CHECK(band_measure(t, A, delta) == doctest::Approx(2.0 * delta / t.perimeter()));
}

TEST_CASE("band sampler returns weighted excursions that start in M") {
    const auto t = geometry::build_stadium(1.0);
    const auto spec = default_reduced_space(t);
    const auto A = channel_set(t, spec);
    Rng rng(6);
    for (int i = 0; i < 300; ++i) {
        try {
            const auto w = sample_band_excursion(t, spec, A, 0.01, rng);
            CHECK(w.band_hits >= 1);
            CHECK(w.weight == doctest::Approx(1.0 / w.band_hits));
            CHECK(in_M(t, spec, w.excursion.start));
        } catch (const TangencyError&) {
        } catch (const CornerError&) {
        }
    }
}

TEST_CASE("monte carlo measure of M on the drivebelt is positive and stable") {
    const auto t = geometry::build_drivebelt(7 * kPi / 6, kPi / 6, 1.0);
    const auto spec = default_reduced_space(t);
    Rng a(7), b(8);
    const auto e1 = measure_M_monte_carlo(t, spec, 20'000, a);
    const auto e2 = measure_M_monte_carlo(t, spec, 20'000, b);
    CHECK(e1.value > 0.0);
    CHECK(std::abs(e1.value - e2.value) < 5 * std::hypot(e1.stderr_, e2.stderr_));
}

TEST_CASE("orbit tracks membership like the return map") {
    const auto t = geometry::build_stadium(1.0);
    const auto spec = default_reduced_space(t);
    Rng rng(9);
    const auto x = sample_mu(t, spec, rng).x;
    Orbit o(t, spec, x);
    CHECK(o.in_M());
    try {
        const auto s = return_map(t, spec, x);
        for (std::uint64_t k = 1; k < s.R; ++k) {
            o.step();
            CHECK_FALSE(o.in_M());
        }
        o.step();
        CHECK(o.in_M());
        CHECK(o.x().r == doctest::Approx(s.end.r));
    } catch (const std::runtime_error&) {
    }
}
