#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdlab/geometry.hpp"
#include "sdlab/rng.hpp"

namespace sdlab::induced {

using geometry::BilliardTable;
using geometry::PhaseVec;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double r) const { return r >= lo && r <= hi; }
};

// A family of parallel periodic orbits running between flat sides.
// `arcs` are the r-ranges on the flat sides where the orbits hit at angle
// `phi`; `flight_length` is the distance between consecutive hits.
struct ChannelDescriptor {
    std::string name;
    double phi = 0.0;
    std::vector<Interval> arcs;
    double flight_length = 0.0;
    double measure() const;  // |A_i|
};

// The cross-section M and its channel structure.
//   stadium / drivebelt: M = first collisions on a focusing arc (the previous
//     collision was on a different piece). Labels k = 2*arc + (phi < 0).
//   lorentz: M = collisions with scatterers. Labels index `channels` by the
//     direction of the free flight that leaves the scatterer.
struct ReducedSpace {
    geometry::TableKind kind = geometry::TableKind::stadium;
    std::vector<std::size_t> m_pieces;
    std::vector<ChannelDescriptor> channels;
    std::size_t label_count = 1;
    std::uint64_t iteration_cap = 1'000'000'000ULL;
    // Unfolded flight direction of each channel, angle in [0, pi/2].
    std::vector<double> channel_directions;
};

// Axis-parallel channels of a rectangular Lorentz table.
std::vector<ChannelDescriptor> detect_axis_channels(const BilliardTable& table);

// Default cross-section. Lorentz tables get detect_axis_channels().
ReducedSpace default_reduced_space(const BilliardTable& table);

// Lorentz cross-section with caller-supplied channels (tables whose
// channels are not axis-parallel).
ReducedSpace lorentz_reduced_space(const BilliardTable& table,
                                   std::vector<ChannelDescriptor> channels);

bool is_m_piece(const ReducedSpace& spec, std::size_t piece);

// Membership in M of a collision on `piece` whose predecessor was on
// `prev_piece`.
bool in_M(const ReducedSpace& spec, std::size_t piece, std::size_t prev_piece);

// Predecessor-free membership test; computes T^{-1} x when needed.
bool in_M(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x);

struct ReturnSample {
    PhaseVec start;
    PhaseVec end;
    std::size_t start_piece = 0;
    std::size_t end_piece = 0;
    std::uint64_t R = 0;
    std::size_t k = 0;
    // Iterates strictly between start and end that hit a flat piece. A
    // bouncing-ball cell has flat_hits == R - 1.
    std::uint64_t flat_hits = 0;
};

// First return of x in M to M. Throws TangencyError, CornerError, or
// IterationCapError after spec.iteration_cap map steps.
ReturnSample return_map(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x);

// Label of an excursion starting at x in M.
std::size_t channel_label(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x);

struct MSample {
    PhaseVec x;
    std::size_t piece = 0;
};

// The channel set A: r-ranges carrying the neutral periodic families
// (stadium flats; drivebelt [0, theta0-pi] u [pi, theta0] on the major arc;
// lorentz channel arcs).
std::vector<Interval> channel_set(const BilliardTable& table, const ReducedSpace& spec);

struct WeightedExcursion {
    ReturnSample excursion;  // starts at a point of M
    double weight = 0.0;
    std::uint64_t band_hits = 0;
};

// Importance sampler for long excursions. Draws y from the collision measure
// restricted to the band B = {r in A, |sin phi| < delta}, walks back to the
// start x in M of the excursion through y, and weights it by 1 / #(excursion
// points in B). Weighted draws are distributed as mu restricted to the
// excursions that visit B, which for small delta contains every long
// excursion along a channel.
WeightedExcursion sample_band_excursion(const BilliardTable& table, const ReducedSpace& spec,
                                        const std::vector<Interval>& band_set, double delta,
                                        Rng& rng);

// mu_M(B) for the band above, in closed form.
double band_measure(const BilliardTable& table, const std::vector<Interval>& band_set,
                    double delta);

struct SamplingCounters {
    std::uint64_t proposals = 0;
    std::uint64_t errors = 0;
};

// Exact draw from mu = mu_M restricted to M and normalised (rejection).
MSample sample_mu(const BilliardTable& table, const ReducedSpace& spec, Rng& rng,
                  SamplingCounters* counters = nullptr);

// mu_M(M) in closed form: stadium 2/(pi+l), lorentz |dB|/|dD|. Throws
// InvalidParameterError for the drivebelt (no trusted closed form).
double measure_M_closed_form(const BilliardTable& table, const ReducedSpace& spec);

struct MonteCarloEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
};

// Fraction of collision-measure draws that land in M.
MonteCarloEstimate measure_M_monte_carlo(const BilliardTable& table, const ReducedSpace& spec,
                                         std::uint64_t samples, Rng& rng);

// Kac: E_mu(R) = 1 / mu_M(M).
double mean_return_time_kac(double measure_M);

struct KacCheck {
    double empirical_mean = 0.0;
    double predicted_mean = 0.0;
    double relative_error() const { return empirical_mean / predicted_mean - 1.0; }
};
KacCheck kac_check(const std::vector<ReturnSample>& samples, double measure_M);

// T-orbit that tracks membership in M along the way.
class Orbit {
public:
    // Membership of the starting point is decided with one inverse step.
    Orbit(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x);
    void step();
    PhaseVec x() const { return x_; }
    std::size_t piece() const { return piece_; }
    bool in_M() const { return in_M_; }

private:
    const BilliardTable* table_;
    const ReducedSpace* spec_;
    PhaseVec x_;
    std::size_t piece_;
    bool in_M_;
};

// Walk one excursion from x in M, calling visit(state, piece, index) for
// x itself (index 0) and each iterate before the return.
template <class Visit>
ReturnSample walk_excursion(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x,
                            Visit&& visit) {
    ReturnSample out;
    out.start = x;
    out.start_piece = table.piece_at(x.r);
    out.k = channel_label(table, spec, x);
    PhaseVec cur = x;
    std::size_t cur_piece = out.start_piece;
    std::uint64_t steps = 0;
    std::uint64_t flat_hits = 0;
    for (;;) {
        visit(cur, cur_piece, steps);
        const auto c = geometry::billiard_map(table, cur);
        ++steps;
        if (in_M(spec, c.piece, cur_piece)) {
            out.flat_hits = flat_hits;
            out.end = c.x;
            out.end_piece = c.piece;
            out.R = steps;
            return out;
        }
        if (steps >= spec.iteration_cap) {
            throw IterationCapError("return_map: excursion exceeded the iteration cap",
                                    spec.iteration_cap);
        }
        if (table.piece(c.piece).curvature == geometry::Curvature::flat) ++flat_hits;
        cur = c.x;
        cur_piece = c.piece;
    }
}

}  // namespace sdlab::induced
