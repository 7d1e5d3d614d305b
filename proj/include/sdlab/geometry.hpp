#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sdlab/errors.hpp"
#include "sdlab/rng.hpp"

namespace sdlab::geometry {

inline constexpr double kPi = 3.14159265358979323846;

// Collision-finding tolerances.
inline constexpr double kMinFreePath = 1e-12;
inline constexpr double kTangencyEps = 1e-10;
inline constexpr double kCornerEps = 1e-10;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// Left normal.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

// r = arclength along the boundary, phi = angle of the outgoing velocity
// from the inward normal, signed so that sin(phi) = v . tangent.
struct PhaseVec {
    double r = 0.0;
    double phi = 0.0;
};

// Time reversal (r, phi) -> (r, -phi).
inline PhaseVec reverse(PhaseVec x) { return {x.r, -x.phi}; }

enum class PieceKind { segment, arc };
enum class Curvature { flat, focusing, dispersing };

// One smooth piece of the boundary. Every piece is oriented so that the
// billiard domain lies to its left; the inward normal is rot90(tangent).
struct BoundaryPiece {
    PieceKind kind = PieceKind::segment;
    Curvature curvature = Curvature::flat;
    // segment
    Vec2 a, b;
    // arc: center + radius*(cos t, sin t), t = start_angle + sweep*s/(radius*|sweep|)
    Vec2 center;
    double radius = 0.0;
    double start_angle = 0.0;
    double sweep = 0.0;  // signed; > 0 counterclockwise
    Vec2 u_start, u_end;  // unit vectors from the centre to the endpoints
    double length = 0.0;
    double offset = 0.0;       // r at the start of the piece
    std::size_t loop = 0;      // index of the closed boundary component
    bool closed = false;       // full circle, no junctions
    std::string name;

    Vec2 point(double s) const;
    Vec2 tangent(double s) const;
    Vec2 normal(double s) const { return rot90(tangent(s)); }
};

enum class TableKind { stadium, drivebelt, lorentz };

struct Disk {
    Vec2 center;
    double radius = 0.0;
};

class BilliardTable {
public:
    TableKind kind() const { return kind_; }
    const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
    const BoundaryPiece& piece(std::size_t i) const { return pieces_[i]; }
    double perimeter() const { return perimeter_; }
    // Index of the piece containing r (r is reduced mod perimeter).
    std::size_t piece_at(double r) const;
    double wrap(double r) const;
    Vec2 position(PhaseVec x) const;
    Vec2 velocity(PhaseVec x) const;

    // Table parameters (whichever apply to kind()).
    double l = 0.0;          // stadium / drivebelt flat length
    double theta0 = 0.0;     // drivebelt major arc angle
    double theta1 = 0.0;     // drivebelt minor arc angle
    double width = 0.0;      // lorentz rectangle l1
    double height = 0.0;     // lorentz rectangle l2
    std::vector<Disk> scatterers;

    friend BilliardTable build_stadium(double l);
    friend BilliardTable build_drivebelt(double theta0, double theta1, double l);
    friend BilliardTable build_lorentz(double l1, double l2, const std::vector<Disk>& scatterers);

private:
    void finalize();

    TableKind kind_ = TableKind::stadium;
    std::vector<BoundaryPiece> pieces_;
    double perimeter_ = 0.0;
};

// Two unit semicircles joined by flats of length l. r = 0 at the start of
// the bottom flat, counterclockwise. Pieces: bottom, right arc, top, left arc.
BilliardTable build_stadium(double l);

// Unit-radius major arc (angle theta0 in (pi, 3pi/2)) and minor arc (theta1 in
// (0, pi/2)) joined by two segments of length l, symmetric about the x-axis.
// With equal radii the segments cannot be tangent to both arcs, so the
// junctions are convex corners. r = 0 at the start of the major arc.
// Pieces: major arc, bottom segment, minor arc, top segment.
BilliardTable build_drivebelt(double theta0, double theta1, double l);

// Rectangle [0,l1]x[0,l2] with disk scatterers. A disk centred at a
// rectangle corner is a quarter-disk cut into that corner; every other disk
// must lie strictly inside. r = 0 at the start of the bottom side.
BilliardTable build_lorentz(double l1, double l2, const std::vector<Disk>& scatterers);

struct Collision {
    PhaseVec x;
    std::size_t piece = 0;
    double free_path = 0.0;
};

// One step of the billiard map. Throws TangencyError / CornerError.
Collision billiard_map(const BilliardTable& table, PhaseVec x);

// Inverse map via time reversal: T^{-1} = I T I.
Collision billiard_map_inverse(const BilliardTable& table, PhaseVec x);

// Draw from cos(phi) dr dphi / (2 |boundary|): r uniform, sin(phi) uniform.
PhaseVec sample_collision_measure(const BilliardTable& table, Rng& rng);

}  // namespace sdlab::geometry
