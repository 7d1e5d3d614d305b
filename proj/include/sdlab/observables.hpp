#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdlab/geometry.hpp"
#include "sdlab/induced.hpp"

namespace sdlab::observables {

using geometry::BilliardTable;
using geometry::PhaseVec;
using induced::ChannelDescriptor;
using induced::Interval;
using induced::ReducedSpace;
using induced::ReturnSample;

// f(x) = value(x) + m_weight * 1_M(x). Membership in M depends on the
// previous collision, so it cannot live inside `value`. `value` must be safe
// to call concurrently.
struct Observable {
    std::string name;
    std::function<double(PhaseVec)> value;
    double m_weight = 0.0;
    double holder_exponent = 1.0;

    double operator()(PhaseVec x, bool in_M) const {
        return value(x) + (in_M ? m_weight : 0.0);
    }
};

// Catalog. `channels` are the r-ranges of the channel set A (see
// induced::channel_set); the shaped observables vanish off A.
Observable constant(double c);
// amp * sin(2 pi periods (r - lo) / |piece|) on each interval of A.
Observable sinusoid_on_channels(std::vector<Interval> channels, double amp, int periods);
// amp * sin(pi (r - lo) / |piece|) * exp(-phi^2 / (2 width^2)) on A.
// Its channel average at phi = 0 is 2 amp / pi.
Observable bump_on_channels(std::vector<Interval> channels, double amp, double width);
// 1 - mu(R) 1_M with mu(R) = 1 / mu_M(M); the T-process centred counterpart
// of the return time.
Observable return_indicator(double measure_M);
// Pointwise sum.
Observable combine(const std::vector<std::pair<double, Observable>>& terms);

struct InducedValue {
    double f_tilde = 0.0;
    ReturnSample sample;
};

// Birkhoff sum of f over the excursion starting at x in M.
InducedValue induced_value(const BilliardTable& table, const ReducedSpace& spec,
                           const Observable& f, PhaseVec x);

// Composite Simpson rule with `panels` panels (rounded up to even).
double simpson(const std::function<double(double)>& g, double a, double b, int panels = 4096);

// int_{r in A} f(r, 0) dr over the table's channel set.
double channel_integral(const BilliardTable& table, const ReducedSpace& spec, const Observable& f,
                        int panels = 4096);

// I_f = int_A f(r,0) dr / |A| for stadium and drivebelt.
double channel_average(const BilliardTable& table, const ReducedSpace& spec, const Observable& f,
                       int panels = 4096);

// Stadium special case: (1 / 2l) int_A f(r, 0) dr.
double channel_average_stadium(const Observable& f, double l, int panels = 4096);

struct ChannelAverages {
    std::vector<double> a;  // one entry per channel label
    std::vector<std::vector<Interval>> sets;
    std::vector<double> phi;
    // Common value when all a_k agree, NaN otherwise.
    double I_f() const;
};

// a_i = int_{A_i} f(r, phi_i) dr / |A_i|.
ChannelAverages channel_averages_lorentz(const Observable& f,
                                         const std::vector<ChannelDescriptor>& channels,
                                         int panels = 4096);

// Stadium / drivebelt averages: one entry per label (2 per focusing arc),
// all equal to I_f.
ChannelAverages channel_averages(const BilliardTable& table, const ReducedSpace& spec,
                                 const Observable& f, int panels = 4096);

// J_f = a_k R.
double J_f_value(const ChannelAverages& averages, const ReturnSample& sample);

struct HolderCheck {
    double coarse_constant = 0.0;  // max |f(x)-f(y)| / d^gamma at d ~ 1e-2
    double fine_constant = 0.0;    // same at d ~ 1e-4
    double sup_norm = 0.0;
    bool warn = false;             // fine constant much larger than coarse
};

// Spot check of the declared exponent near the channel set (|phi| < 0.1).
HolderCheck holder_spot_check(const BilliardTable& table, const ReducedSpace& spec,
                              const Observable& f, Rng& rng, int pairs = 1000);

}  // namespace sdlab::observables
