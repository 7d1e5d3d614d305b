#include "sdlab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "sdlab/errors.hpp"

namespace sdlab::stats {

double truncated_variance(std::span<const double> samples, double t) {
    if (!(t > 0.0)) throw InvalidParameterError("truncated_variance: t must be > 0");
    if (samples.empty()) return 0.0;
    // Two-pass for accuracy; the truncation keeps values bounded by t.
    double mean = 0.0;
    for (double x : samples) mean += std::abs(x) < t ? x : 0.0;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double x : samples) {
        const double d = (std::abs(x) < t ? x : 0.0) - mean;
        var += d * d;
    }
    return var / static_cast<double>(samples.size());
}

Moments moments(std::span<const double> values) {
    Moments m;
    const auto n = static_cast<double>(values.size());
    if (values.empty()) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : values) {
        const double d = x - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.variance = values.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.kurtosis = m4 / (m2 * m2);
    }
    return m;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidParameterError("quantile: no values");
    std::sort(values.begin(), values.end());
    // Linear interpolation between order statistics (type 7).
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double robust_variance(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    // 2 * Phi^{-1}(3/4)
    const double scale = 2.0 * boost::math::quantile(boost::math::normal(), 0.75);
    return (iqr / scale) * (iqr / scale);
}

void CountHistogram::add(std::uint64_t value, std::uint64_t times) {
    const std::uint64_t c = cap();
    if (value >= c) {
        counts_[c] += times;
        if (value > c) overflow_ += times;
    } else {
        counts_[value] += times;
    }
    total_ += times;
    max_ = std::max(max_, value);
}

void CountHistogram::merge(const CountHistogram& other) {
    if (other.cap() != cap()) throw InvalidParameterError("CountHistogram::merge: cap mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    overflow_ += other.overflow_;
    total_ += other.total_;
    max_ = std::max(max_, other.max_);
}

std::uint64_t CountHistogram::at_least(std::uint64_t n) const {
    if (n > cap()) return overflow_;  // lower bound only
    std::uint64_t s = 0;
    for (std::size_t i = n; i < counts_.size(); ++i) s += counts_[i];
    return s;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) {
        throw InvalidParameterError("log_grid: need 0 < lo < hi and at least 2 points");
    }
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        g[i] = std::round(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
    }
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

namespace {

struct Plateau {
    double median = 0.0;
    double intercept = 0.0;
    double slope = 0.0;
};

Plateau plateau_of(const std::vector<double>& grid, const std::vector<std::uint64_t>& counts,
                   double total, std::uint64_t min_count) {
    std::vector<double> vals, inv, ys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (counts[i] < min_count) continue;
        const double v = grid[i] * grid[i] * static_cast<double>(counts[i]) / total;
        vals.push_back(v);
        inv.push_back(1.0 / grid[i]);
        ys.push_back(v);
    }
    Plateau p;
    if (vals.empty()) return p;
    p.median = median(vals);
    if (vals.size() >= 2) {
        const auto f = linear_fit(inv, ys);
        p.intercept = f.intercept;
        p.slope = f.slope;
    } else {
        p.intercept = vals.front();
    }
    return p;
}

}  // namespace

TailEstimate tail_constant(const CountHistogram& hist, const std::vector<double>& grid,
                           Rng* bootstrap_rng, int bootstrap, std::uint64_t min_count) {
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end())) {
        throw InvalidParameterError("tail_constant: grid must be non-empty and increasing");
    }
    if (hist.total() == 0) throw InsufficientTailError("tail_constant: no samples");
    TailEstimate est;
    est.grid = grid;
    const double total = static_cast<double>(hist.total());
    for (double g : grid) {
        const auto n = static_cast<std::uint64_t>(std::ceil(g));
        const std::uint64_t c = hist.at_least(n);
        est.counts.push_back(c);
        est.prob.push_back(static_cast<double>(c) / total);
        est.n2prob.push_back(g * g * static_cast<double>(c) / total);
        est.used.push_back(c >= min_count);
    }
    const bool any_used = std::any_of(est.used.begin(), est.used.end(), [](bool b) { return b; });
    if (!any_used) {
        if (est.counts.front() == 0) return est;  // bounded below the grid: no heavy tail
        throw InsufficientTailError(
            "tail_constant: fewer than " + std::to_string(min_count) +
            " exceedances at every grid point; the grid is too deep for this sample size");
    }
    const auto p = plateau_of(grid, est.counts, total, min_count);
    est.plateau = p.median;
    est.extrapolated = p.intercept;
    est.slope = p.slope;
    est.ci_lo = est.ci_hi = est.plateau;

    if (bootstrap_rng && bootstrap > 0) {
        // Multinomial resampling of the histogram by conditional binomials.
        // Everything below the first grid point is one pooled cell.
        const auto first = static_cast<std::uint64_t>(std::ceil(grid.front()));
        std::vector<std::uint64_t> values, counts;
        for (std::uint64_t v = first; v <= hist.cap(); ++v) {
            if (hist.counts()[v]) {
                values.push_back(v);
                counts.push_back(hist.counts()[v]);
            }
        }
        std::vector<double> reps;
        reps.reserve(static_cast<std::size_t>(bootstrap));
        for (int b = 0; b < bootstrap; ++b) {
            std::uint64_t remaining = hist.total();
            double mass_left = total;
            std::vector<std::uint64_t> draw(values.size());
            for (std::size_t i = 0; i < values.size() && remaining > 0; ++i) {
                const double q = std::min(1.0, static_cast<double>(counts[i]) / mass_left);
                std::binomial_distribution<std::uint64_t> bin(remaining, q);
                draw[i] = bin(*bootstrap_rng);
                remaining -= draw[i];
                mass_left -= static_cast<double>(counts[i]);
            }
            std::vector<std::uint64_t> exceed(grid.size(), 0);
            // Suffix sums over the resampled tail.
            std::uint64_t acc = 0;
            std::size_t gi = grid.size();
            for (std::size_t i = values.size(); i-- > 0;) {
                acc += draw[i];
                while (gi > 0 && static_cast<std::uint64_t>(std::ceil(grid[gi - 1])) > values[i]) {
                    exceed[--gi] = acc - draw[i];
                }
            }
            while (gi > 0) exceed[--gi] = acc;
            reps.push_back(plateau_of(grid, exceed, total, min_count).median);
        }
        est.ci_lo = quantile(reps, 0.025);
        est.ci_hi = quantile(reps, 0.975);
    }
    return est;
}

TailEstimate tail_constant(std::span<const double> samples, const std::vector<double>& grid,
                           Rng* bootstrap_rng, int bootstrap, std::uint64_t min_count) {
    if (grid.empty()) throw InvalidParameterError("tail_constant: empty grid");
    const auto cap = static_cast<std::uint64_t>(std::ceil(grid.back())) + 1;
    CountHistogram h(cap);
    for (double x : samples) {
        const double a = std::abs(x);
        h.add(a >= static_cast<double>(cap) ? cap + 1 : static_cast<std::uint64_t>(std::floor(a)));
    }
    return tail_constant(h, grid, bootstrap_rng, bootstrap, min_count);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> values) {
    if (values.empty()) throw InvalidParameterError("ks_distance: no values");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = normal_cdf(values[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& cells) {
    if (cells.size() < 2) throw InvalidParameterError("chi_square_uniform: need >= 2 cells");
    double total = 0.0;
    for (auto c : cells) total += static_cast<double>(c);
    const double expected = total / static_cast<double>(cells.size());
    ChiSquare out;
    for (auto c : cells) {
        const double d = static_cast<double>(c) - expected;
        out.statistic += d * d / expected;
    }
    out.dof = static_cast<int>(cells.size()) - 1;
    out.p_value = boost::math::cdf(
        boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
    return out;
}

std::vector<double> autocovariance(std::span<const double> series, const std::vector<int>& lags) {
    const std::size_t n = series.size();
    if (n == 0) throw InvalidParameterError("autocovariance: empty series");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> out;
    for (int k : lags) {
        if (k < 0 || static_cast<std::size_t>(k) >= n) {
            throw InvalidParameterError("autocovariance: lag outside [0, length)");
        }
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) s += (series[i] - mean) * (series[i + k] - mean);
        out.push_back(s / static_cast<double>(n));
    }
    return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidParameterError("pearson_correlation: need two equal-length series");
    }
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidParameterError("linear_fit: need two equal-length series");
    }
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
    return f;
}

TransitionEstimate transition_estimate(
    const std::vector<TransitionPair>& pairs, const std::vector<double>& m_edges,
    const std::vector<double>& n_edges,
    const std::function<double(double, double, double)>& model) {
    if (m_edges.size() < 2 || n_edges.size() < 2) {
        throw InvalidParameterError("transition_estimate: need at least one m-bin and one n-bin");
    }
    const std::size_t mb = m_edges.size() - 1;
    const std::size_t nb = n_edges.size() - 1;
    auto bin_of = [](const std::vector<double>& e, double v) -> long {
        if (v < e.front() || v >= e.back()) return -1;
        return static_cast<long>(std::upper_bound(e.begin(), e.end(), v) - e.begin()) - 1;
    };
    std::vector<double> w_total(mb, 0.0);
    std::vector<double> w(mb * nb, 0.0), w2(mb * nb, 0.0), w_model(mb * nb, 0.0);
    std::vector<std::uint64_t> cnt(mb * nb, 0);
    std::vector<std::vector<const TransitionPair*>> members(mb);
    for (const auto& p : pairs) {
        const long i = bin_of(m_edges, p.m);
        if (i < 0) continue;
        w_total[i] += p.weight;
        members[i].push_back(&p);
        const long j = bin_of(n_edges, p.n);
        if (j < 0) continue;
        w[i * nb + j] += p.weight;
        cnt[i * nb + j] += 1;
    }
    TransitionEstimate out;
    for (std::size_t i = 0; i < mb; ++i) {
        if (members[i].empty()) {
            out.empty_m_bins.push_back({m_edges[i], m_edges[i + 1]});
            continue;
        }
        const double W = w_total[i];
        for (std::size_t j = 0; j < nb; ++j) {
            TransitionCell c;
            c.m_lo = m_edges[i];
            c.m_hi = m_edges[i + 1];
            c.n_lo = n_edges[j];
            c.n_hi = n_edges[j + 1];
            c.count = cnt[i * nb + j];
            c.p_hat = w[i * nb + j] / W;
            // Ratio-estimator standard error; reduces to the multinomial
            // sqrt(p(1-p)/N) for unit weights.
            double v = 0.0;
            double model_sum = 0.0;
            for (const auto* p : members[i]) {
                const long jj = bin_of(n_edges, p->n);
                const double ind = (jj == static_cast<long>(j)) ? 1.0 : 0.0;
                const double r = p->weight * (ind - c.p_hat);
                v += r * r;
                if (model) model_sum += p->weight * model(p->m, c.n_lo, c.n_hi);
            }
            c.stderr_ = std::sqrt(v) / W;
            c.model_p = model ? model_sum / W : 0.0;
            out.cells.push_back(c);
        }
    }
    return out;
}

std::vector<double> relative_bins(double lo, double hi, double width) {
    if (!(lo > 0.0 && hi > lo && width > 0.0)) {
        throw InvalidParameterError("relative_bins: need 0 < lo < hi and width > 0");
    }
    std::vector<double> e{lo};
    while (e.back() < hi) e.push_back(e.back() * (1.0 + width));
    return e;
}

}  // namespace sdlab::stats
