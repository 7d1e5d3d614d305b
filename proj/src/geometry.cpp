#include "sdlab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace sdlab::geometry {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
// Extent slack when accepting a hit on a piece. Smaller than kCornerEps so a
// hit that lands in a junction gap is still caught and reported as a corner.
constexpr double kExtentSlack = 1e-12;

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

BoundaryPiece make_segment(Vec2 a, Vec2 b, std::string name) {
    BoundaryPiece p;
    p.kind = PieceKind::segment;
    p.curvature = Curvature::flat;
    p.a = a;
    p.b = b;
    p.length = norm(b - a);
    p.name = std::move(name);
    return p;
}

BoundaryPiece make_arc(Vec2 c, double radius, double start, double sweep, std::string name) {
    BoundaryPiece p;
    p.kind = PieceKind::arc;
    // Counterclockwise arcs bound the domain from outside (focusing);
    // clockwise arcs are the boundary of an obstacle (dispersing).
    p.curvature = sweep > 0.0 ? Curvature::focusing : Curvature::dispersing;
    p.center = c;
    p.radius = radius;
    p.start_angle = start;
    p.sweep = sweep;
    p.length = radius * std::abs(sweep);
    p.closed = std::abs(std::abs(sweep) - kTwoPi) < 1e-15;
    p.u_start = {std::cos(start), std::sin(start)};
    p.u_end = {std::cos(start + sweep), std::sin(start + sweep)};
    p.name = std::move(name);
    return p;
}

// Is the point w (relative to the centre, |w| = radius) on the arc, up to
// kExtentSlack of arclength? Cross products only; no trig.
bool on_arc(const BoundaryPiece& arc, Vec2 w) {
    if (arc.closed) return true;
    const double sg = sgn(arc.sweep);
    const double slack = kExtentSlack * arc.radius;
    const double after_start = sg * cross(arc.u_start, w);
    const double before_end = sg * cross(w, arc.u_end);
    if (std::abs(arc.sweep) <= kPi) return after_start >= -slack && before_end >= -slack;
    // Major arc: on it unless strictly inside the complementary minor arc.
    return !(after_start < -slack && before_end < -slack);
}

// Smallest root t > kMinFreePath of |w + t v|^2 = rho^2 that lands on the
// arc, or +inf.
double hit_arc(const BoundaryPiece& arc, Vec2 p, Vec2 v) {
    const Vec2 w = p - arc.center;
    const double b = dot(w, v);
    const double c = dot(w, w) - arc.radius * arc.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    const double sq = std::sqrt(disc);
    // Stable pair of roots.
    const double q = -b - sgn(b) * sq;
    double roots[2] = {q, q != 0.0 ? c / q : 0.0};
    if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    for (double t : roots) {
        if (!(t > kMinFreePath)) continue;
        if (on_arc(arc, w + t * v)) return t;
    }
    return std::numeric_limits<double>::infinity();
}

// Arclength coordinate of a point on the arc's circle.
double arc_param(const BoundaryPiece& arc, Vec2 q) {
    const Vec2 h = q - arc.center;
    double rel = (std::atan2(h.y, h.x) - arc.start_angle) * sgn(arc.sweep);
    rel = std::fmod(rel, kTwoPi);
    if (rel < 0.0) rel += kTwoPi;
    double s = rel * arc.radius;
    if (!arc.closed && s > arc.length && s > kTwoPi * arc.radius - kCornerEps) {
        s -= kTwoPi * arc.radius;  // just before the start
    }
    return s;
}

double hit_segment(const BoundaryPiece& seg, Vec2 p, Vec2 v) {
    const Vec2 d = seg.b - seg.a;
    const double denom = cross(v, d);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    const Vec2 ap = seg.a - p;
    const double t = cross(ap, d) / denom;
    const double u = cross(ap, v) / denom;
    if (!(t > kMinFreePath)) return std::numeric_limits<double>::infinity();
    const double s = u * seg.length;
    if (s < -kExtentSlack || s > seg.length + kExtentSlack) {
        return std::numeric_limits<double>::infinity();
    }
    return t;
}

std::string describe(PhaseVec x) {
    std::ostringstream os;
    os.precision(17);
    os << "(r=" << x.r << ", phi=" << x.phi << ")";
    return os.str();
}

}  // namespace

Vec2 BoundaryPiece::point(double s) const {
    if (kind == PieceKind::segment) {
        return a + (s / length) * (b - a);
    }
    const double t = start_angle + sgn(sweep) * s / radius;
    return center + radius * Vec2{std::cos(t), std::sin(t)};
}

Vec2 BoundaryPiece::tangent(double s) const {
    if (kind == PieceKind::segment) {
        return (1.0 / length) * (b - a);
    }
    const double t = start_angle + sgn(sweep) * s / radius;
    return sgn(sweep) * Vec2{-std::sin(t), std::cos(t)};
}

void BilliardTable::finalize() {
    double acc = 0.0;
    for (auto& p : pieces_) {
        p.offset = acc;
        acc += p.length;
    }
    perimeter_ = acc;
}

double BilliardTable::wrap(double r) const {
    if (r >= 0.0 && r < perimeter_) return r;
    double w = std::fmod(r, perimeter_);
    if (w < 0.0) w += perimeter_;
    if (w >= perimeter_) w = 0.0;
    return w;
}

std::size_t BilliardTable::piece_at(double r) const {
    r = wrap(r);
    for (std::size_t i = pieces_.size(); i-- > 0;) {
        if (r >= pieces_[i].offset) return i;
    }
    return 0;
}

Vec2 BilliardTable::position(PhaseVec x) const {
    const double r = wrap(x.r);
    const auto& p = pieces_[piece_at(r)];
    return p.point(r - p.offset);
}

Vec2 BilliardTable::velocity(PhaseVec x) const {
    const double r = wrap(x.r);
    const auto& p = pieces_[piece_at(r)];
    const double s = r - p.offset;
    return std::cos(x.phi) * p.normal(s) + std::sin(x.phi) * p.tangent(s);
}

BilliardTable build_stadium(double l) {
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw InvalidParameterError("stadium: flat length l must be positive, got " +
                                    std::to_string(l));
    }
    BilliardTable t;
    t.kind_ = TableKind::stadium;
    t.l = l;
    t.pieces_.push_back(make_segment({0.0, -1.0}, {l, -1.0}, "bottom"));
    t.pieces_.push_back(make_arc({l, 0.0}, 1.0, -kPi / 2, kPi, "right_arc"));
    t.pieces_.push_back(make_segment({l, 1.0}, {0.0, 1.0}, "top"));
    t.pieces_.push_back(make_arc({0.0, 0.0}, 1.0, kPi / 2, kPi, "left_arc"));
    t.finalize();
    return t;
}

BilliardTable build_drivebelt(double theta0, double theta1, double l) {
    if (!(theta0 > kPi && theta0 < 1.5 * kPi)) {
        throw InvalidParameterError("drivebelt: theta0 must lie in (pi, 3pi/2)");
    }
    if (!(theta1 > 0.0 && theta1 < 0.5 * kPi)) {
        throw InvalidParameterError("drivebelt: theta1 must lie in (0, pi/2)");
    }
    const double h0 = std::sin(theta0 / 2);
    const double h1 = std::sin(theta1 / 2);
    if (!(l > h0 - h1)) {
        throw InvalidParameterError("drivebelt: l too short to join the arcs");
    }
    // Major arc about the origin over polar angles [pi - theta0/2, pi + theta0/2],
    // minor arc about (d, 0) over [-theta1/2, theta1/2].
    const Vec2 p_top{-std::cos(theta0 / 2), h0};
    const Vec2 p_bot{p_top.x, -h0};
    const double dx = std::sqrt(l * l - (h0 - h1) * (h0 - h1));
    const double d = p_top.x + dx - std::cos(theta1 / 2);
    const Vec2 q_bot{d + std::cos(theta1 / 2), -h1};
    const Vec2 q_top{q_bot.x, h1};

    BilliardTable t;
    t.kind_ = TableKind::drivebelt;
    t.theta0 = theta0;
    t.theta1 = theta1;
    t.l = l;
    t.pieces_.push_back(make_arc({0.0, 0.0}, 1.0, kPi - theta0 / 2, theta0, "major_arc"));
    t.pieces_.push_back(make_segment(p_bot, q_bot, "bottom"));
    t.pieces_.push_back(make_arc({d, 0.0}, 1.0, -theta1 / 2, theta1, "minor_arc"));
    t.pieces_.push_back(make_segment(q_top, p_top, "top"));
    t.finalize();

    // Every junction must turn left (convex corner or tangent join).
    const auto& ps = t.pieces_;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& cur = ps[i];
        const auto& nxt = ps[(i + 1) % ps.size()];
        const double turn = cross(cur.tangent(cur.length), nxt.tangent(0.0));
        if (turn < -1e-12) {
            throw InvalidParameterError("drivebelt: parameters give a reflex corner after " +
                                        cur.name);
        }
    }
    return t;
}

BilliardTable build_lorentz(double l1, double l2, const std::vector<Disk>& scatterers) {
    if (!(l1 > 0.0 && l2 > 0.0)) {
        throw InvalidParameterError("lorentz: rectangle sides must be positive");
    }
    if (scatterers.empty()) {
        throw InvalidParameterError("lorentz: at least one scatterer is required");
    }
    const Vec2 corners[4] = {{0.0, 0.0}, {l1, 0.0}, {l1, l2}, {0.0, l2}};
    double corner_radius[4] = {0.0, 0.0, 0.0, 0.0};
    std::vector<Disk> interior;
    for (const auto& d : scatterers) {
        if (!(d.radius > 0.0)) throw InvalidParameterError("lorentz: scatterer radius must be positive");
        bool at_corner = false;
        for (int c = 0; c < 4; ++c) {
            if (norm(d.center - corners[c]) < 1e-12) {
                if (corner_radius[c] > 0.0) throw InvalidParameterError("lorentz: two disks at one corner");
                if (d.radius >= std::min(l1, l2)) throw InvalidParameterError("lorentz: corner disk too large");
                corner_radius[c] = d.radius;
                at_corner = true;
            }
        }
        if (at_corner) continue;
        if (d.center.x - d.radius <= 0.0 || d.center.x + d.radius >= l1 ||
            d.center.y - d.radius <= 0.0 || d.center.y + d.radius >= l2) {
            throw InvalidParameterError("lorentz: interior scatterer not contained in the rectangle");
        }
        interior.push_back(d);
    }
    for (std::size_t i = 0; i < scatterers.size(); ++i) {
        for (std::size_t j = i + 1; j < scatterers.size(); ++j) {
            const double gap = norm(scatterers[i].center - scatterers[j].center) -
                               scatterers[i].radius - scatterers[j].radius;
            if (!(gap > 0.0)) throw InvalidParameterError("lorentz: scatterers overlap");
        }
    }
    for (int c = 0; c < 4; ++c) {
        const int n = (c + 1) % 4;
        const double side = (c % 2 == 0) ? l1 : l2;
        if (corner_radius[c] + corner_radius[n] >= side) {
            throw InvalidParameterError("lorentz: corner disks cover a whole side");
        }
    }

    BilliardTable t;
    t.kind_ = TableKind::lorentz;
    t.width = l1;
    t.height = l2;
    t.scatterers = scatterers;
    const char* side_names[4] = {"bottom", "right", "top", "left"};
    for (int c = 0; c < 4; ++c) {
        const int n = (c + 1) % 4;
        const Vec2 dir = (1.0 / norm(corners[n] - corners[c])) * (corners[n] - corners[c]);
        const Vec2 a = corners[c] + corner_radius[c] * dir;
        const Vec2 b = corners[n] - corner_radius[n] * dir;
        t.pieces_.push_back(make_segment(a, b, side_names[c]));
        if (corner_radius[n] > 0.0) {
            // Quarter circle around corner n, clockwise from the incoming side
            // to the outgoing side.
            const Vec2 from = b - corners[n];
            const double start = std::atan2(from.y, from.x);
            t.pieces_.push_back(make_arc(corners[n], corner_radius[n], start, -kPi / 2,
                                         std::string("corner_disk_") + std::to_string(n)));
        }
    }
    std::size_t loop = 1;
    for (const auto& d : interior) {
        auto p = make_arc(d.center, d.radius, 0.0, -kTwoPi, "disk_" + std::to_string(loop));
        p.loop = loop++;
        t.pieces_.push_back(p);
    }
    t.finalize();
    return t;
}

Collision billiard_map(const BilliardTable& table, PhaseVec x) {
    const double r = table.wrap(x.r);
    const std::size_t cur = table.piece_at(r);
    const auto& pieces = table.pieces();
    const auto& here = pieces[cur];
    const double s0 = r - here.offset;
    Vec2 p, tg0;
    if (here.kind == PieceKind::segment) {
        tg0 = (1.0 / here.length) * (here.b - here.a);
        p = here.a + s0 * tg0;
    } else {
        const double sg = sgn(here.sweep);
        const double ang = here.start_angle + sg * s0 / here.radius;
        const Vec2 u{std::cos(ang), std::sin(ang)};
        p = here.center + here.radius * u;
        tg0 = sg * rot90(u);
    }
    const Vec2 v = std::cos(x.phi) * rot90(tg0) + std::sin(x.phi) * tg0;

    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best = pieces.size();
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        const auto& pc = pieces[j];
        double t;
        if (pc.kind == PieceKind::segment) {
            if (j == cur) continue;
            t = hit_segment(pc, p, v);
        } else {
            // A convex obstacle cannot be hit twice in a row.
            if (j == cur && pc.curvature == Curvature::dispersing) continue;
            t = hit_arc(pc, p, v);
        }
        if (t < best_t) {
            best_t = t;
            best = j;
        }
    }
    if (best == pieces.size()) {
        throw std::logic_error("billiard_map: trajectory left the table from " + describe(x));
    }
    const auto& hit = pieces[best];
    const Vec2 q = p + best_t * v;
    double s;
    Vec2 tg;
    if (hit.kind == PieceKind::segment) {
        tg = (1.0 / hit.length) * (hit.b - hit.a);
        s = dot(q - hit.a, tg);
    } else {
        const Vec2 h = q - hit.center;
        const Vec2 u = (1.0 / norm(h)) * h;
        tg = sgn(hit.sweep) * rot90(u);
        s = arc_param(hit, q);
    }
    if (!hit.closed && (s < kCornerEps || s > hit.length - kCornerEps)) {
        throw CornerError("collision within corner tolerance of a junction, from " + describe(x));
    }
    s = std::clamp(s, 0.0, hit.length);
    const Vec2 n = rot90(tg);
    const double vn = dot(v, n);
    if (std::abs(vn) < kTangencyEps) {
        throw TangencyError("near-tangential collision, from " + describe(x));
    }
    const Vec2 out = v - (2.0 * vn) * n;
    Collision c;
    c.x.r = hit.offset + s;
    if (c.x.r >= table.perimeter()) c.x.r = table.wrap(c.x.r);
    c.x.phi = std::atan2(dot(out, tg), dot(out, n));
    c.piece = best;
    c.free_path = best_t;
    return c;
}

Collision billiard_map_inverse(const BilliardTable& table, PhaseVec x) {
    Collision c = billiard_map(table, reverse(x));
    c.x = reverse(c.x);
    return c;
}

PhaseVec sample_collision_measure(const BilliardTable& table, Rng& rng) {
    PhaseVec x;
    x.r = table.perimeter() * rng.uniform();
    // sin(phi) uniform on (-1, 1): exact inverse transform of cos(phi) dphi / 2.
    x.phi = std::asin(2.0 * rng.uniform_open() - 1.0);
    return x;
}

}  // namespace sdlab::geometry
