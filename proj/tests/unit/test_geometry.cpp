#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "sdlab/geometry.hpp"

using namespace sdlab;
using namespace sdlab::geometry;

namespace {

// Brute-force collision oracle: march along the ray until `inside` fails,
// bisect the crossing, and reflect about the normal estimated from the
// gradient of `level` (positive inside).
struct OracleHit {
    Vec2 q;
    Vec2 v_out;
};

OracleHit ray_march(const std::function<double(Vec2)>& level, Vec2 p, Vec2 v) {
    const double h = 1e-3;
    double t = 1e-9;
    while (level(p + (t + h) * v) > 0.0) t += h;
    double lo = t, hi = t + h;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (level(p + mid * v) > 0.0 ? lo : hi) = mid;
    }
    const Vec2 q = p + lo * v;
    const double e = 1e-7;
    Vec2 g{(level(q + Vec2{e, 0}) - level(q - Vec2{e, 0})) / (2 * e),
           (level(q + Vec2{0, e}) - level(q - Vec2{0, e})) / (2 * e)};
    g = (1.0 / norm(g)) * g;
    return {q, v - (2.0 * dot(v, g)) * g};
}

// Signed distance-like functions, positive inside the domain.
double stadium_level(Vec2 q, double l) {
    if (q.x >= 0.0 && q.x <= l) return 1.0 - std::abs(q.y);
    const Vec2 c{q.x < 0.0 ? 0.0 : l, 0.0};
    return 1.0 - norm(q - c);
}

double lorentz_level(Vec2 q, double l1, double l2, const std::vector<Disk>& disks) {
    double d = std::min({q.x, l1 - q.x, q.y, l2 - q.y});
    for (const auto& k : disks) d = std::min(d, norm(q - k.center) - k.radius);
    return d;
}

void compare_with_oracle(const BilliardTable& t, const std::function<double(Vec2)>& level,
                         std::uint64_t seed, int trials) {
    Rng rng(seed);
    int checked = 0;
    for (int i = 0; i < trials; ++i) {
        const auto x = sample_collision_measure(t, rng);
        if (std::abs(std::sin(x.phi)) > 0.95) continue;  // keep the march well conditioned
        Collision c;
        try {
            c = billiard_map(t, x);
        } catch (const CornerError&) {
            continue;
        } catch (const TangencyError&) {
            continue;
        }
        const auto o = ray_march(level, t.position(x), t.velocity(x));
        const Vec2 q = t.position(c.x);
        const Vec2 w = t.velocity(c.x);
        CHECK(norm(q - o.q) < 1e-8);
        CHECK(norm(w - o.v_out) < 1e-5);
        ++checked;
    }
    CHECK(checked > trials / 2);
}

}  // namespace

TEST_CASE("stadium layout") {
    const auto t = build_stadium(1.5);
    CHECK(t.perimeter() == doctest::Approx(3.0 + 2.0 * kPi).epsilon(1e-14));
    REQUIRE(t.pieces().size() == 4);
    CHECK(t.piece(0).name == "bottom");
    CHECK(t.piece(1).curvature == Curvature::focusing);
    CHECK(t.piece(2).curvature == Curvature::flat);
    CHECK(t.piece_at(0.1) == 0);
    CHECK(t.piece_at(1.5 + 0.1) == 1);
    CHECK(t.piece_at(t.perimeter() + 0.1) == 0);
    CHECK_THROWS_AS(build_stadium(0.0), InvalidParameterError);
    CHECK_THROWS_AS(build_stadium(-1.0), InvalidParameterError);
}

TEST_CASE("inward normal and velocity convention") {
    const auto t = build_stadium(1.0);
    // Bottom flat, phi = 0: straight up.
    const Vec2 v = t.velocity({0.5, 0.0});
    CHECK(v.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v.y == doctest::Approx(1.0));
    // sin(phi) = v . tangent; the bottom runs left to right.
    const Vec2 w = t.velocity({0.5, 0.3});
    CHECK(w.x == doctest::Approx(std::sin(0.3)));
}

TEST_CASE("bouncing-ball orbit across the flats") {
    const double l = 1.0;
    const auto t = build_stadium(l);
    const auto c = billiard_map(t, {0.3, 0.0});
    CHECK(c.piece == 2);
    CHECK(c.free_path == doctest::Approx(2.0));
    CHECK(c.x.r == doctest::Approx(l + kPi + (l - 0.3)));
    CHECK(c.x.phi == doctest::Approx(0.0).epsilon(1e-12));
    const auto back = billiard_map(t, c.x);
    CHECK(back.x.r == doctest::Approx(0.3));
}

TEST_CASE("stadium map against a ray-march oracle") {
    const double l = 1.0;
    const auto t = build_stadium(l);
    compare_with_oracle(t, [l](Vec2 q) { return stadium_level(q, l); }, 11, 300);
}

TEST_CASE("lorentz map against a ray-march oracle") {
    const std::vector<Disk> disks{{{1.0, 1.0}, 0.5}, {{0.0, 0.0}, 0.5}, {{2.0, 0.0}, 0.5}};
    const auto t = build_lorentz(2.0, 2.0, disks);
    compare_with_oracle(t, [&](Vec2 q) { return lorentz_level(q, 2.0, 2.0, disks); }, 12, 300);
}

TEST_CASE("time reversal inverts the map") {
    for (const auto& t : {build_stadium(1.0), build_drivebelt(7 * kPi / 6, kPi / 6, 1.0),
                          build_lorentz(2.0, 2.0, {{{1.0, 1.0}, 0.5}})}) {
        Rng rng(3);
        double worst = 0.0;
        int done = 0;
        while (done < 2000) {
            const auto x = sample_collision_measure(t, rng);
            try {
                const auto y = billiard_map(t, x);
                const auto z = billiard_map_inverse(t, y.x);
                double dr = std::abs(z.x.r - x.r);
                dr = std::min(dr, t.perimeter() - dr);
                worst = std::max({worst, dr, std::abs(z.x.phi - x.phi)});
                ++done;
            } catch (const CornerError&) {
            } catch (const TangencyError&) {
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("free paths stay above the minimum and below the diameter") {
    const auto t = build_drivebelt(7 * kPi / 6, kPi / 6, 1.0);
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) {
        try {
            const auto c = billiard_map(t, sample_collision_measure(t, rng));
            CHECK(c.free_path > kMinFreePath);
            CHECK(c.free_path < 5.0);
            CHECK(std::abs(c.x.phi) <= kPi / 2);
        } catch (const CornerError&) {
        } catch (const TangencyError&) {
        }
    }
}

TEST_CASE("grazing a scatterer raises TangencyError") {
    const auto t = build_lorentz(2.0, 2.0, {{{1.0, 1.0}, 0.5}});
    CHECK_THROWS_AS(billiard_map(t, {0.5, 0.0}), TangencyError);
}

TEST_CASE("hitting a junction raises CornerError") {
    const auto t = build_stadium(1.0);
    // From the middle of the top flat straight at the bottom-left junction (0, -1).
    const double r_top = 1.0 + kPi + 0.5;  // point (0.5, 1)
    const Vec2 d{-0.5, -2.0};
    // phi measured from the inward normal (0, -1); tangent of the top is (-1, 0).
    const double phi = std::atan2(dot(d, Vec2{-1.0, 0.0}), dot(d, Vec2{0.0, -1.0}));
    CHECK_THROWS_AS(billiard_map(t, {r_top, phi}), CornerError);
}

TEST_CASE("lorentz parameter validation") {
    CHECK_THROWS_AS(build_lorentz(2.0, 2.0, {}), InvalidParameterError);
    CHECK_THROWS_AS(build_lorentz(2.0, 2.0, {{{1.0, 1.0}, 1.5}}), InvalidParameterError);
    CHECK_THROWS_AS(build_lorentz(2.0, 2.0, {{{1.0, 1.0}, 0.5}, {{1.2, 1.0}, 0.5}}),
                    InvalidParameterError);
    CHECK_THROWS_AS(build_lorentz(-1.0, 2.0, {{{1.0, 1.0}, 0.1}}), InvalidParameterError);
}

TEST_CASE("drivebelt parameter validation") {
    CHECK_THROWS_AS(build_drivebelt(0.9 * kPi, kPi / 6, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_drivebelt(7 * kPi / 6, 0.6 * kPi, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_drivebelt(7 * kPi / 6, kPi / 6, 0.01), InvalidParameterError);
    const auto t = build_drivebelt(7 * kPi / 6, kPi / 6, 1.0);
    CHECK(t.perimeter() == doctest::Approx(7 * kPi / 6 + kPi / 6 + 2.0));
}

TEST_CASE("collision-measure sampler: r uniform and sin(phi) uniform") {
    const auto t = build_stadium(1.0);
    Rng rng(5);
    const int N = 200'000;
    double mr = 0.0, ms = 0.0, ms2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const auto x = sample_collision_measure(t, rng);
        REQUIRE(x.r >= 0.0);
        REQUIRE(x.r < t.perimeter());
        mr += x.r / t.perimeter();
        const double s = std::sin(x.phi);
        ms += s;
        ms2 += s * s;
    }
    CHECK(mr / N == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(ms / N) < 0.01);
    CHECK(ms2 / N == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}
