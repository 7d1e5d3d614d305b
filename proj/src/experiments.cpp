#include "sdlab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "sdlab/constants.hpp"
#include "sdlab/martingale.hpp"

namespace sdlab::experiments {

namespace {

constexpr std::uint64_t kPilotStream = 1ULL << 40;
constexpr std::size_t kPilotReplicas = 64;

// Centre used for truncation: the exact mean, or a pilot estimate on
// streams disjoint from the replicas.
double provisional_center(const sources::ValueSource& source, std::size_t n,
                          const RunOptions& opts) {
    if (auto m = source.known_mean()) return *m;
    std::vector<double> means(kPilotReplicas);
    sources::for_each_replica(kPilotReplicas, opts.threads, [&](std::size_t r) {
        std::vector<double> v;
        source.generate(split_seed(opts.seed, kPilotStream + r), n, v);
        double s = 0.0;
        for (double x : v) s += x;
        means[r] = s / static_cast<double>(n);
    });
    return stats::median(means);
}

struct TruncatedSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    double count = 0.0;
    void add(double y) {
        sum += y;
        sum_sq += y * y;
        count += 1.0;
    }
    double variance() const {
        const double m = sum / count;
        return sum_sq / count - m * m;
    }
};

}  // namespace

CltResult clt_experiment(const sources::ValueSource& source, const CltSpec& spec,
                         const RunOptions& opts) {
    if (spec.n < 2 || spec.replicas < 1) {
        throw InvalidParameterError("clt_experiment: need n >= 2 and at least one replica");
    }
    const double n = static_cast<double>(spec.n);
    CltResult out;
    out.theta = source.theta();
    out.c_n = martingale::truncation_level(n);
    const double p = provisional_center(source, spec.n, opts);

    std::vector<double> sums(spec.replicas);
    std::vector<TruncatedSums> trunc(spec.replicas);
    std::vector<std::uint64_t> restarts(spec.replicas);
    sources::for_each_replica(spec.replicas, opts.threads, [&](std::size_t r) {
        std::vector<double> v;
        restarts[r] = source.generate(split_seed(opts.seed, r), spec.n, v).restarts;
        double s = 0.0;
        for (double x : v) {
            s += x;
            const double y = x - p;
            trunc[r].add(std::abs(y) < out.c_n ? y : 0.0);
        }
        sums[r] = s;
    });
    // Reduction in replica order.
    TruncatedSums pooled;
    double total = 0.0;
    for (std::size_t r = 0; r < spec.replicas; ++r) {
        pooled.sum += trunc[r].sum;
        pooled.sum_sq += trunc[r].sum_sq;
        pooled.count += trunc[r].count;
        total += sums[r];
        out.restarts += restarts[r];
    }
    out.H = pooled.variance();
    out.center = source.known_mean() ? *source.known_mean()
                                     : total / (n * static_cast<double>(spec.replicas));

    const double factor = spec.variance_factor ? constants::variance_factor(out.theta) : 1.0;
    const double empirical = std::sqrt(factor * n * out.H);
    double closed = 0.0;
    if (spec.c_M_f > 0.0) closed = std::sqrt(factor * spec.c_M_f * n * std::log(n));
    if (spec.normalizer == Normalizer::closed_form) {
        if (!(closed > 0.0)) {
            throw InvalidParameterError("clt_experiment: closed-form normalizer needs c_M_f > 0");
        }
        out.normalizer = closed;
        out.alt_normalizer = empirical;
    } else {
        out.normalizer = empirical;
        out.alt_normalizer = closed;
    }
    out.values.resize(spec.replicas);
    for (std::size_t r = 0; r < spec.replicas; ++r) {
        out.values[r] = (sums[r] - n * out.center) / out.normalizer;
    }
    out.D = stats::ks_distance(out.values);
    out.moments = stats::moments(out.values);
    return out;
}

PathResult path_experiment(const sources::ValueSource& source, const PathSpec& spec,
                           const RunOptions& opts) {
    if (spec.n < 2 || spec.replicas < 2 || spec.t_grid.empty()) {
        throw InvalidParameterError("path_experiment: need n >= 2, two replicas and a t-grid");
    }
    for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
        const double t = spec.t_grid[i];
        if (!(t > 0.0 && t <= 1.0) || (i > 0 && !(t > spec.t_grid[i - 1]))) {
            throw InvalidParameterError("path_experiment: t-grid must be increasing in (0, 1]");
        }
    }
    const double n = static_cast<double>(spec.n);
    const std::size_t g = spec.t_grid.size();
    std::vector<std::size_t> stops(g);
    for (std::size_t i = 0; i < g; ++i) {
        stops[i] = static_cast<std::size_t>(std::floor(spec.t_grid[i] * n + 1e-9));
    }
    const double c_n = martingale::truncation_level(n);
    const double p = provisional_center(source, spec.n, opts);

    std::vector<std::vector<double>> partial(g, std::vector<double>(spec.replicas));
    std::vector<TruncatedSums> trunc(spec.replicas);
    std::vector<double> sums(spec.replicas);
    std::vector<std::uint64_t> restarts(spec.replicas);
    sources::for_each_replica(spec.replicas, opts.threads, [&](std::size_t r) {
        std::vector<double> v;
        restarts[r] = source.generate(split_seed(opts.seed, r), spec.n, v).restarts;
        double s = 0.0;
        std::size_t j = 0;
        for (std::size_t k = 0; k < spec.n; ++k) {
            while (j < g && stops[j] == k) partial[j++][r] = s;
            s += v[k];
            const double y = v[k] - p;
            trunc[r].add(std::abs(y) < c_n ? y : 0.0);
        }
        while (j < g) partial[j++][r] = s;
        sums[r] = s;
    });
    TruncatedSums pooled;
    double total = 0.0;
    PathResult out;
    for (std::size_t r = 0; r < spec.replicas; ++r) {
        pooled.sum += trunc[r].sum;
        pooled.sum_sq += trunc[r].sum_sq;
        pooled.count += trunc[r].count;
        total += sums[r];
        out.restarts += restarts[r];
    }
    const double mean = source.known_mean() ? *source.known_mean()
                                            : total / (n * static_cast<double>(spec.replicas));
    out.normalizer = std::sqrt(constants::variance_factor(source.theta()) * n * pooled.variance());
    out.t = spec.t_grid;
    out.W.assign(g, std::vector<double>(spec.replicas));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t r = 0; r < spec.replicas; ++r) {
            out.W[i][r] = (partial[i][r] - static_cast<double>(stops[i]) * mean) / out.normalizer;
        }
        out.variance.push_back(stats::moments(out.W[i]).variance);
        std::vector<double> scaled(out.W[i]);
        for (auto& w : scaled) w /= std::sqrt(out.t[i]);
        out.ks.push_back(stats::ks_distance(std::move(scaled)));
    }
    out.variance_fit = stats::linear_fit(out.t, out.variance);
    out.slope_relative = out.variance_fit.slope / out.variance.back() - 1.0;

    std::vector<std::vector<double>> inc(g, std::vector<double>(spec.replicas));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t r = 0; r < spec.replicas; ++r) {
            inc[i][r] = out.W[i][r] - (i ? out.W[i - 1][r] : 0.0);
        }
    }
    out.increment_corr.assign(g * g, 1.0);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            const double c = stats::pearson_correlation(inc[i], inc[j]);
            out.increment_corr[i * g + j] = out.increment_corr[j * g + i] = c;
            out.max_abs_increment_corr = std::max(out.max_abs_increment_corr, std::abs(c));
        }
    }
    return out;
}

TvfResult t_vs_f_experiment(std::shared_ptr<const sources::BilliardSetup> setup, std::size_t n,
                            std::size_t replicas, double measure_M, const RunOptions& opts) {
    if (n < 2 || replicas < 4) {
        throw InvalidParameterError("t_vs_f_experiment: need n >= 2 and at least 4 replicas");
    }
    const sources::TMapSource t_source(setup);
    const sources::InducedSource f_source(setup);
    TvfResult out;
    out.target = measure_M;
    out.t_sums.resize(replicas);
    out.f_sums.resize(replicas);
    std::vector<std::uint64_t> restarts(replicas);
    const double scale = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
    const double mean = setup->mean.value_or(0.0);
    sources::for_each_replica(replicas, opts.threads, [&](std::size_t r) {
        const std::uint64_t seed = split_seed(opts.seed, r);
        std::vector<double> v;
        restarts[r] = t_source.generate(split_seed(seed, 0), n, v).restarts;
        double s = 0.0;
        for (double x : v) s += x;
        // mu_M(f) = mu_M(M) mu(f_tilde).
        out.t_sums[r] = (s - static_cast<double>(n) * measure_M * mean) / scale;
        restarts[r] += f_source.generate(split_seed(seed, 1), n, v).restarts;
        s = 0.0;
        for (double x : v) s += x;
        out.f_sums[r] = (s - static_cast<double>(n) * mean) / scale;
    });
    for (auto c : restarts) out.restarts += c;
    out.robust_ratio = stats::robust_variance(out.t_sums) / stats::robust_variance(out.f_sums);
    out.plain_ratio = stats::moments(out.t_sums).variance / stats::moments(out.f_sums).variance;
    return out;
}

ReturnTimeSample return_time_histogram(const geometry::BilliardTable& table,
                                       const induced::ReducedSpace& spec, std::uint64_t samples,
                                       const RunOptions& opts, std::uint64_t cap,
                                       std::uint64_t block) {
    if (block == 0) throw InvalidParameterError("return_time_histogram: block must be > 0");
    const std::size_t blocks = static_cast<std::size_t>((samples + block - 1) / block);
    std::vector<ReturnTimeSample> parts(blocks, ReturnTimeSample{stats::CountHistogram(cap), 0, 0});
    sources::for_each_replica(blocks, opts.threads, [&](std::size_t b) {
        Rng rng(split_seed(opts.seed, b));
        auto& part = parts[b];
        const std::uint64_t todo = std::min<std::uint64_t>(block, samples - b * block);
        std::uint64_t done = 0;
        while (done < todo) {
            const auto x = induced::sample_mu(table, spec, rng);
            try {
                part.histogram.add(induced::return_map(table, spec, x.x).R);
                ++done;
            } catch (const TangencyError&) {
                ++part.singular;
            } catch (const CornerError&) {
                ++part.singular;
            } catch (const IterationCapError&) {
                // Counted, and recorded as a return beyond every grid point.
                ++part.cap_hits;
                part.histogram.add(spec.iteration_cap);
                ++done;
            }
        }
    });
    ReturnTimeSample out{stats::CountHistogram(cap), 0, 0};
    for (const auto& p : parts) {
        out.histogram.merge(p.histogram);
        out.singular += p.singular;
        out.cap_hits += p.cap_hits;
    }
    return out;
}

BilliardTransitions billiard_transitions(const geometry::BilliardTable& table,
                                         const induced::ReducedSpace& spec, double m_lo,
                                         double m_hi, double delta, std::size_t pairs,
                                         const RunOptions& opts, std::size_t block) {
    if (!(m_lo >= 1.0 && m_hi >= m_lo)) {
        throw InvalidParameterError("billiard_transitions: need 1 <= m_lo <= m_hi");
    }
    const auto band = induced::channel_set(table, spec);
    BilliardTransitions out;
    // Blocks of draws run in parallel; blocks are appended in order until
    // enough pairs are collected.
    const unsigned threads = sources::resolve_threads(opts.threads);
    std::size_t next_block = 0;
    while (out.bouncing.size() < pairs) {
        std::vector<BilliardTransitions> parts(threads);
        sources::for_each_replica(threads, threads, [&](std::size_t t) {
            Rng rng(split_seed(opts.seed, next_block + t));
            auto& part = parts[t];
            for (std::size_t i = 0; i < block; ++i) {
                ++part.draws;
                try {
                    const auto w = induced::sample_band_excursion(table, spec, band, delta, rng);
                    const auto& e = w.excursion;
                    const double m = static_cast<double>(e.R);
                    if (m < m_lo || m > m_hi) continue;
                    const auto next = induced::return_map(table, spec, e.end);
                    const double n = static_cast<double>(next.R);
                    const bool violates = n < m / 3.0 - 10.0 || n > 3.0 * m + 10.0;
                    const std::uint64_t interior = e.R - 1;
                    if (2 * e.flat_hits >= interior) {
                        part.bouncing.push_back({m, n, w.weight});
                        if (violates) ++part.bouncing_violations;
                    } else {
                        ++part.sliding;
                        if (violates) ++part.sliding_violations;
                    }
                } catch (const TangencyError&) {
                } catch (const CornerError&) {
                }
            }
        });
        next_block += threads;
        for (auto& p : parts) {
            out.bouncing.insert(out.bouncing.end(), p.bouncing.begin(), p.bouncing.end());
            out.sliding += p.sliding;
            out.bouncing_violations += p.bouncing_violations;
            out.sliding_violations += p.sliding_violations;
            out.draws += p.draws;
        }
    }
    return out;
}

std::vector<stats::TransitionPair> chain_transitions(const chain::SpreadingKernel& kernel,
                                                     std::size_t steps, std::size_t replicas,
                                                     const RunOptions& opts) {
    std::vector<std::vector<stats::TransitionPair>> parts(replicas);
    sources::for_each_replica(replicas, opts.threads, [&](std::size_t r) {
        Rng rng(split_seed(opts.seed, r));
        const auto tr = chain::run_chain(kernel, steps + 1, 10'000, rng);
        for (std::size_t k = 0; k < steps; ++k) {
            parts[r].push_back({static_cast<double>(tr[k]), static_cast<double>(tr[k + 1]), 1.0});
        }
    });
    std::vector<stats::TransitionPair> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace sdlab::experiments
