#include "sdlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdlab::observables {

using geometry::kPi;
using geometry::TableKind;

namespace {

const Interval* find_interval(const std::vector<Interval>& set, double r) {
    for (const auto& a : set) {
        if (a.contains(r)) return &a;
    }
    return nullptr;
}

void require_channels(const std::vector<Interval>& channels, const char* who) {
    if (channels.empty()) throw InvalidParameterError(std::string(who) + ": empty channel set");
    for (const auto& a : channels) {
        if (!(a.length() > 0.0)) {
            throw InvalidParameterError(std::string(who) + ": degenerate channel interval");
        }
    }
}

}  // namespace

Observable constant(double c) {
    Observable f;
    f.name = "constant";
    f.value = [c](PhaseVec) { return c; };
    f.holder_exponent = 1.0;
    return f;
}

Observable sinusoid_on_channels(std::vector<Interval> channels, double amp, int periods) {
    require_channels(channels, "sinusoid_on_channels");
    if (periods < 1) throw InvalidParameterError("sinusoid_on_channels: periods must be >= 1");
    Observable f;
    f.name = "sinusoid";
    f.value = [channels = std::move(channels), amp, periods](PhaseVec x) {
        const Interval* a = find_interval(channels, x.r);
        if (!a) return 0.0;
        return amp * std::sin(2.0 * kPi * periods * (x.r - a->lo) / a->length());
    };
    f.holder_exponent = 1.0;
    return f;
}

Observable bump_on_channels(std::vector<Interval> channels, double amp, double width) {
    require_channels(channels, "bump_on_channels");
    if (!(width > 0.0)) throw InvalidParameterError("bump_on_channels: width must be > 0");
    Observable f;
    f.name = "bump";
    f.value = [channels = std::move(channels), amp, width](PhaseVec x) {
        const Interval* a = find_interval(channels, x.r);
        if (!a) return 0.0;
        return amp * std::sin(kPi * (x.r - a->lo) / a->length()) *
               std::exp(-x.phi * x.phi / (2.0 * width * width));
    };
    f.holder_exponent = 1.0;
    return f;
}

Observable return_indicator(double measure_M) {
    if (!(measure_M > 0.0 && measure_M <= 1.0)) {
        throw InvalidParameterError("return_indicator: measure of M must be in (0, 1]");
    }
    Observable f;
    f.name = "return_indicator";
    f.value = [](PhaseVec) { return 1.0; };
    f.m_weight = -1.0 / measure_M;
    f.holder_exponent = 1.0;
    return f;
}

Observable combine(const std::vector<std::pair<double, Observable>>& terms) {
    Observable f;
    f.name = "combination";
    f.holder_exponent = 1.0;
    for (const auto& [w, g] : terms) {
        f.m_weight += w * g.m_weight;
        f.holder_exponent = std::min(f.holder_exponent, g.holder_exponent);
    }
    f.value = [terms](PhaseVec x) {
        double s = 0.0;
        for (const auto& [w, g] : terms) s += w * g.value(x);
        return s;
    };
    return f;
}

InducedValue induced_value(const BilliardTable& table, const ReducedSpace& spec,
                           const Observable& f, PhaseVec x) {
    InducedValue out;
    double sum = 0.0;
    out.sample = induced::walk_excursion(table, spec, x,
                                         [&](PhaseVec s, std::size_t, std::uint64_t index) {
                                             sum += f(s, index == 0);
                                         });
    out.f_tilde = sum;
    return out;
}

double simpson(const std::function<double(double)>& g, double a, double b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double odd = 0.0;
    double even = 0.0;
    for (int i = 1; i < panels; ++i) {
        const double v = g(a + i * h);
        (i % 2 ? odd : even) += v;
    }
    return h / 3.0 * (g(a) + g(b) + 4.0 * odd + 2.0 * even);
}

double channel_integral(const BilliardTable& table, const ReducedSpace& spec, const Observable& f,
                        int panels) {
    double total = 0.0;
    for (const auto& a : induced::channel_set(table, spec)) {
        total += simpson([&](double r) { return f.value({r, 0.0}); }, a.lo, a.hi, panels);
    }
    return total;
}

double channel_average(const BilliardTable& table, const ReducedSpace& spec, const Observable& f,
                       int panels) {
    double len = 0.0;
    for (const auto& a : induced::channel_set(table, spec)) len += a.length();
    if (!(len > 0.0)) throw InvalidParameterError("channel_average: empty channel set");
    return channel_integral(table, spec, f, panels) / len;
}

double channel_average_stadium(const Observable& f, double l, int panels) {
    if (!(l > 0.0)) throw InvalidParameterError("channel_average_stadium: l must be > 0");
    const double i1 = simpson([&](double r) { return f.value({r, 0.0}); }, 0.0, l, panels);
    const double i2 =
        simpson([&](double r) { return f.value({r, 0.0}); }, kPi + l, kPi + 2.0 * l, panels);
    return (i1 + i2) / (2.0 * l);
}

double ChannelAverages::I_f() const {
    if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
    for (double v : a) {
        if (std::abs(v - a.front()) > 1e-12 * std::max(1.0, std::abs(a.front()))) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    return a.front();
}

ChannelAverages channel_averages_lorentz(const Observable& f,
                                         const std::vector<ChannelDescriptor>& channels,
                                         int panels) {
    if (channels.empty()) throw InvalidParameterError("channel_averages_lorentz: no channels");
    ChannelAverages out;
    for (const auto& c : channels) {
        const double len = c.measure();
        if (!(len > 0.0)) {
            throw InvalidParameterError("channel_averages_lorentz: channel " + c.name +
                                        " has empty r-range");
        }
        double integral = 0.0;
        for (const auto& a : c.arcs) {
            integral += simpson([&](double r) { return f.value({r, c.phi}); }, a.lo, a.hi, panels);
        }
        out.a.push_back(integral / len);
        out.sets.push_back(c.arcs);
        out.phi.push_back(c.phi);
    }
    return out;
}

ChannelAverages channel_averages(const BilliardTable& table, const ReducedSpace& spec,
                                 const Observable& f, int panels) {
    if (table.kind() == TableKind::lorentz) {
        return channel_averages_lorentz(f, spec.channels, panels);
    }
    const double I = channel_average(table, spec, f, panels);
    ChannelAverages out;
    out.a.assign(spec.label_count, I);
    out.sets.assign(spec.label_count, induced::channel_set(table, spec));
    out.phi.assign(spec.label_count, 0.0);
    return out;
}

double J_f_value(const ChannelAverages& averages, const ReturnSample& sample) {
    if (sample.k >= averages.a.size()) {
        throw InvalidParameterError("J_f_value: unknown channel label " + std::to_string(sample.k));
    }
    return averages.a[sample.k] * static_cast<double>(sample.R);
}

HolderCheck holder_spot_check(const BilliardTable& table, const ReducedSpace& spec,
                              const Observable& f, Rng& rng, int pairs) {
    const auto set = induced::channel_set(table, spec);
    double total = 0.0;
    for (const auto& a : set) total += a.length();
    HolderCheck out;
    const double gamma = f.holder_exponent;
    auto draw = [&] {
        double u = rng.uniform() * total;
        double r = set.back().lo;
        for (const auto& a : set) {
            if (u < a.length()) {
                r = a.lo + u;
                break;
            }
            u -= a.length();
        }
        return PhaseVec{r, rng.uniform(-0.1, 0.1)};
    };
    auto probe = [&](double scale) {
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            const PhaseVec x = draw();
            const double dr = rng.uniform(-scale, scale);
            const double dp = rng.uniform(-scale, scale);
            const PhaseVec y{table.wrap(x.r + dr), std::clamp(x.phi + dp, -0.1, 0.1)};
            const double d = std::hypot(dr, y.phi - x.phi);
            if (d <= 0.0) continue;
            const double fx = f.value(x);
            const double fy = f.value(y);
            out.sup_norm = std::max({out.sup_norm, std::abs(fx), std::abs(fy)});
            worst = std::max(worst, std::abs(fx - fy) / std::pow(d, gamma));
        }
        return worst;
    };
    out.coarse_constant = probe(1e-2);
    out.fine_constant = probe(1e-4);
    out.warn = out.fine_constant > 10.0 * std::max(out.coarse_constant, 1e-300);
    return out;
}

}  // namespace sdlab::observables
