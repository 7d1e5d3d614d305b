#include "sdlab/induced.hpp"

#include <algorithm>
#include <cmath>

namespace sdlab::induced {

using geometry::Curvature;
using geometry::kPi;
using geometry::PieceKind;
using geometry::TableKind;
using geometry::Vec2;

double ChannelDescriptor::measure() const {
    double m = 0.0;
    for (const auto& a : arcs) m += a.length();
    return m;
}

namespace {

// Complement of a union of intervals inside [0, span].
std::vector<Interval> free_gaps(std::vector<Interval> blocked, double span) {
    std::sort(blocked.begin(), blocked.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> gaps;
    double cursor = 0.0;
    for (const auto& b : blocked) {
        if (b.lo > cursor) gaps.push_back({cursor, b.lo});
        cursor = std::max(cursor, b.hi);
    }
    if (cursor < span) gaps.push_back({cursor, span});
    return gaps;
}

// r-range on a straight side covering the coordinate window [lo, hi]
// (x or y depending on the side's direction).
Interval side_range(const geometry::BoundaryPiece& side, bool vertical, double lo, double hi) {
    const double a = vertical ? side.a.y : side.a.x;
    const double b = vertical ? side.b.y : side.b.x;
    const double s_lo = (lo - a) / (b - a) * side.length;
    const double s_hi = (hi - a) / (b - a) * side.length;
    return {side.offset + std::min(s_lo, s_hi), side.offset + std::max(s_lo, s_hi)};
}

double unfolded_direction(Vec2 v) { return std::atan2(std::abs(v.y), std::abs(v.x)); }

double channel_direction(const BilliardTable& table, const ChannelDescriptor& c) {
    if (c.arcs.empty()) return 0.0;
    const double r = 0.5 * (c.arcs.front().lo + c.arcs.front().hi);
    return unfolded_direction(table.velocity({r, c.phi}));
}

}  // namespace

std::vector<ChannelDescriptor> detect_axis_channels(const BilliardTable& table) {
    std::vector<ChannelDescriptor> out;
    if (table.kind() != TableKind::lorentz) return out;
    const double w = table.width;
    const double h = table.height;
    std::vector<Interval> block_y, block_x;
    for (const auto& d : table.scatterers) {
        block_y.push_back({std::max(0.0, d.center.y - d.radius), std::min(h, d.center.y + d.radius)});
        block_x.push_back({std::max(0.0, d.center.x - d.radius), std::min(w, d.center.x + d.radius)});
    }
    const geometry::BoundaryPiece* left = nullptr;
    const geometry::BoundaryPiece* right = nullptr;
    const geometry::BoundaryPiece* top = nullptr;
    const geometry::BoundaryPiece* bottom = nullptr;
    for (const auto& p : table.pieces()) {
        if (p.name == "left") left = &p;
        if (p.name == "right") right = &p;
        if (p.name == "top") top = &p;
        if (p.name == "bottom") bottom = &p;
    }
    int idx = 0;
    for (const auto& g : free_gaps(block_y, h)) {
        ChannelDescriptor c;
        c.name = "horizontal_" + std::to_string(idx++);
        c.phi = 0.0;
        c.flight_length = w;
        c.arcs.push_back(side_range(*right, true, g.lo, g.hi));
        c.arcs.push_back(side_range(*left, true, g.lo, g.hi));
        out.push_back(c);
    }
    idx = 0;
    for (const auto& g : free_gaps(block_x, w)) {
        ChannelDescriptor c;
        c.name = "vertical_" + std::to_string(idx++);
        c.phi = 0.0;
        c.flight_length = h;
        c.arcs.push_back(side_range(*bottom, false, g.lo, g.hi));
        c.arcs.push_back(side_range(*top, false, g.lo, g.hi));
        out.push_back(c);
    }
    return out;
}

ReducedSpace default_reduced_space(const BilliardTable& table) {
    if (table.kind() == TableKind::lorentz) {
        return lorentz_reduced_space(table, detect_axis_channels(table));
    }
    ReducedSpace s;
    s.kind = table.kind();
    for (std::size_t i = 0; i < table.pieces().size(); ++i) {
        if (table.piece(i).curvature == Curvature::focusing) s.m_pieces.push_back(i);
    }
    s.label_count = 2 * s.m_pieces.size();
    return s;
}

ReducedSpace lorentz_reduced_space(const BilliardTable& table,
                                   std::vector<ChannelDescriptor> channels) {
    if (table.kind() != TableKind::lorentz) {
        throw InvalidParameterError("lorentz_reduced_space: table is not a Lorentz table");
    }
    ReducedSpace s;
    s.kind = TableKind::lorentz;
    for (std::size_t i = 0; i < table.pieces().size(); ++i) {
        if (table.piece(i).curvature == Curvature::dispersing) s.m_pieces.push_back(i);
    }
    for (const auto& c : channels) {
        if (!(c.flight_length > 0.0)) {
            throw InvalidParameterError("channel " + c.name + ": flight length must be positive");
        }
        s.channel_directions.push_back(channel_direction(table, c));
    }
    s.channels = std::move(channels);
    s.label_count = std::max<std::size_t>(1, s.channels.size());
    return s;
}

bool is_m_piece(const ReducedSpace& spec, std::size_t piece) {
    return std::find(spec.m_pieces.begin(), spec.m_pieces.end(), piece) != spec.m_pieces.end();
}

bool in_M(const ReducedSpace& spec, std::size_t piece, std::size_t prev_piece) {
    if (!is_m_piece(spec, piece)) return false;
    if (spec.kind == TableKind::lorentz) return true;
    return piece != prev_piece;
}

bool in_M(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x) {
    const std::size_t piece = table.piece_at(x.r);
    if (!is_m_piece(spec, piece)) return false;
    if (spec.kind == TableKind::lorentz) return true;
    return geometry::billiard_map_inverse(table, x).piece != piece;
}

std::size_t channel_label(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x) {
    if (spec.kind != TableKind::lorentz) {
        const std::size_t piece = table.piece_at(x.r);
        const auto it = std::find(spec.m_pieces.begin(), spec.m_pieces.end(), piece);
        const auto arc = static_cast<std::size_t>(it - spec.m_pieces.begin());
        return 2 * arc + (x.phi < 0.0 ? 1 : 0);
    }
    if (spec.channel_directions.size() <= 1) return 0;
    const double psi = unfolded_direction(table.velocity(x));
    std::size_t best = 0;
    for (std::size_t i = 1; i < spec.channel_directions.size(); ++i) {
        if (std::abs(psi - spec.channel_directions[i]) <
            std::abs(psi - spec.channel_directions[best])) {
            best = i;
        }
    }
    return best;
}

ReturnSample return_map(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x) {
    return walk_excursion(table, spec, x, [](PhaseVec, std::size_t, std::uint64_t) {});
}

MSample sample_mu(const BilliardTable& table, const ReducedSpace& spec, Rng& rng,
                  SamplingCounters* counters) {
    for (;;) {
        if (counters) ++counters->proposals;
        const PhaseVec x = geometry::sample_collision_measure(table, rng);
        const std::size_t piece = table.piece_at(x.r);
        if (!is_m_piece(spec, piece)) continue;
        if (spec.kind == TableKind::lorentz) return {x, piece};
        try {
            if (geometry::billiard_map_inverse(table, x).piece != piece) return {x, piece};
        } catch (const TangencyError&) {
            if (counters) ++counters->errors;
        } catch (const CornerError&) {
            if (counters) ++counters->errors;
        }
    }
}

std::vector<Interval> channel_set(const BilliardTable& table, const ReducedSpace& spec) {
    switch (table.kind()) {
        case TableKind::stadium:
            return {{0.0, table.l}, {kPi + table.l, kPi + 2.0 * table.l}};
        case TableKind::drivebelt:
            return {{0.0, table.theta0 - kPi}, {kPi, table.theta0}};
        case TableKind::lorentz: {
            std::vector<Interval> out;
            for (const auto& c : spec.channels) out.insert(out.end(), c.arcs.begin(), c.arcs.end());
            return out;
        }
    }
    return {};
}

double band_measure(const BilliardTable& table, const std::vector<Interval>& band_set,
                    double delta) {
    double len = 0.0;
    for (const auto& a : band_set) len += a.length();
    // (|A| * 2 delta) / (2 |dD|) in (r, sin phi) coordinates.
    return len * delta / table.perimeter();
}

WeightedExcursion sample_band_excursion(const BilliardTable& table, const ReducedSpace& spec,
                                        const std::vector<Interval>& band_set, double delta,
                                        Rng& rng) {
    if (band_set.empty() || !(delta > 0.0 && delta <= 1.0)) {
        throw InvalidParameterError("sample_band_excursion: empty band or delta outside (0, 1]");
    }
    double total = 0.0;
    for (const auto& a : band_set) total += a.length();
    auto in_band = [&](PhaseVec z) {
        if (std::abs(std::sin(z.phi)) >= delta) return false;
        const double r = table.wrap(z.r);
        for (const auto& a : band_set) {
            if (a.contains(r)) return true;
        }
        return false;
    };
    for (;;) {
        double u = rng.uniform() * total;
        double r = band_set.back().hi;
        for (const auto& a : band_set) {
            if (u < a.length()) {
                r = a.lo + u;
                break;
            }
            u -= a.length();
        }
        PhaseVec z{r, std::asin(delta * (2.0 * rng.uniform_open() - 1.0))};
        try {
            // Walk back to the excursion's start.
            std::size_t z_piece = table.piece_at(z.r);
            std::uint64_t back = 0;
            for (;;) {
                const auto prev = geometry::billiard_map_inverse(table, z);
                if (in_M(spec, z_piece, prev.piece)) break;
                z = prev.x;
                z_piece = prev.piece;
                if (++back >= spec.iteration_cap) {
                    throw IterationCapError("sample_band_excursion: backward walk exceeded the cap",
                                            spec.iteration_cap);
                }
            }
            WeightedExcursion w;
            w.excursion = walk_excursion(table, spec, z, [&](PhaseVec s, std::size_t, std::uint64_t) {
                if (in_band(s)) ++w.band_hits;
            });
            // Rounding can put the drawn point a hair outside the band
            // when it is re-derived along the forward walk.
            if (w.band_hits == 0) continue;
            w.weight = 1.0 / static_cast<double>(w.band_hits);
            return w;
        } catch (const TangencyError&) {
        } catch (const CornerError&) {
        }
    }
}

double measure_M_closed_form(const BilliardTable& table, const ReducedSpace& spec) {
    switch (table.kind()) {
        case TableKind::stadium:
            return 2.0 / (kPi + table.l);
        case TableKind::lorentz: {
            double scatter = 0.0;
            for (std::size_t i : spec.m_pieces) scatter += table.piece(i).length;
            return scatter / table.perimeter();
        }
        case TableKind::drivebelt:
            break;
    }
    throw InvalidParameterError(
        "measure_M_closed_form: no closed form for this table; use measure_M_monte_carlo");
}

MonteCarloEstimate measure_M_monte_carlo(const BilliardTable& table, const ReducedSpace& spec,
                                         std::uint64_t samples, Rng& rng) {
    std::uint64_t hits = 0;
    std::uint64_t used = 0;
    while (used < samples) {
        const PhaseVec x = geometry::sample_collision_measure(table, rng);
        try {
            if (in_M(table, spec, x)) ++hits;
            ++used;
        } catch (const TangencyError&) {
        } catch (const CornerError&) {
        }
    }
    MonteCarloEstimate e;
    e.samples = used;
    e.value = static_cast<double>(hits) / static_cast<double>(used);
    e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(used));
    return e;
}

double mean_return_time_kac(double measure_M) { return 1.0 / measure_M; }

KacCheck kac_check(const std::vector<ReturnSample>& samples, double measure_M) {
    KacCheck k;
    double sum = 0.0;
    for (const auto& s : samples) sum += static_cast<double>(s.R);
    k.empirical_mean = samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
    k.predicted_mean = mean_return_time_kac(measure_M);
    return k;
}

Orbit::Orbit(const BilliardTable& table, const ReducedSpace& spec, PhaseVec x)
    : table_(&table), spec_(&spec), x_(x), piece_(table.piece_at(x.r)),
      in_M_(induced::in_M(table, spec, x)) {}

void Orbit::step() {
    const auto c = geometry::billiard_map(*table_, x_);
    in_M_ = induced::in_M(*spec_, c.piece, piece_);
    x_ = c.x;
    piece_ = c.piece;
}

}  // namespace sdlab::induced
