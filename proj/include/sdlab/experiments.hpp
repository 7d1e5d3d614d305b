#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sdlab/sources.hpp"
#include "sdlab/stats.hpp"

namespace sdlab::experiments {

struct RunOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

enum class Normalizer { empirical, closed_form };

struct CltSpec {
    std::size_t n = 10'000;
    std::size_t replicas = 1'000;
    Normalizer normalizer = Normalizer::empirical;
    double c_M_f = 0.0;          // closed form only
    bool variance_factor = true;  // include (1+theta)/(1-theta)
};

struct CltResult {
    std::vector<double> values;  // normalised centred sums, by replica
    double D = 0.0;
    stats::Moments moments;
    double normalizer = 0.0;      // the one used
    double alt_normalizer = 0.0;  // the other variant (0 if unavailable)
    double H = 0.0;               // pooled empirical H(c_n)
    double c_n = 0.0;
    double center = 0.0;
    double theta = 0.0;
    std::uint64_t restarts = 0;
};

// Replica r uses seed split_seed(opts.seed, r). Sums are centred by the
// source's exact mean when known, else by the pooled sample mean.
CltResult clt_experiment(const sources::ValueSource& source, const CltSpec& spec,
                         const RunOptions& opts);

struct PathSpec {
    std::size_t n = 10'000;
    std::size_t replicas = 1'000;
    std::vector<double> t_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

struct PathResult {
    std::vector<double> t;
    std::vector<std::vector<double>> W;  // W[i][r] = W_n(t_i) of replica r
    std::vector<double> variance;        // Var W_n(t_i)
    stats::LinearFit variance_fit;       // Var W_n(t) against t
    double slope_relative = 0.0;         // slope / Var W_n(1) - 1
    std::vector<double> ks;              // KS of W_n(t)/sqrt(t) against N(0,1)
    // Correlations of the increments over [t_{i-1}, t_i] (t_{-1} = 0),
    // row-major, size t.size()^2.
    std::vector<double> increment_corr;
    double max_abs_increment_corr = 0.0;
    double normalizer = 0.0;
    std::uint64_t restarts = 0;
};

// W_n(t) = sum_{k <= tn} (X_k - mean) / sqrt((1+theta)/(1-theta) n H(c_n)).
PathResult path_experiment(const sources::ValueSource& source, const PathSpec& spec,
                           const RunOptions& opts);

struct TvfResult {
    std::vector<double> t_sums;  // T-process sums / sqrt(n ln n)
    std::vector<double> f_sums;  // F-process sums / sqrt(n ln n)
    double robust_ratio = 0.0;   // IQR-based variance ratio T/F
    double plain_ratio = 0.0;
    double target = 0.0;         // mu_M(M)
    std::uint64_t restarts = 0;
};

// Same observable under T (from the collision measure) and under F (from
// mu), n steps each.
TvfResult t_vs_f_experiment(std::shared_ptr<const sources::BilliardSetup> setup, std::size_t n,
                            std::size_t replicas, double measure_M, const RunOptions& opts);

struct ReturnTimeSample {
    stats::CountHistogram histogram;
    std::uint64_t singular = 0;   // draws discarded on a singular collision
    std::uint64_t cap_hits = 0;
};

// Return times of independent draws from mu, in blocks of `block` draws;
// block b uses seed split_seed(opts.seed, b).
ReturnTimeSample return_time_histogram(const geometry::BilliardTable& table,
                                       const induced::ReducedSpace& spec, std::uint64_t samples,
                                       const RunOptions& opts, std::uint64_t cap = 1'000'000,
                                       std::uint64_t block = 1u << 20);

struct BilliardTransitions {
    std::vector<stats::TransitionPair> bouncing;  // (m, n, weight), m in range
    std::uint64_t sliding = 0;                    // excursions skipped as sliding
    std::uint64_t bouncing_violations = 0;        // n outside [m/3 - 10, 3m + 10]
    std::uint64_t sliding_violations = 0;
    std::uint64_t draws = 0;
};

// Importance-sampled (m -> n) pairs with m = R of an excursion through the
// channel band in [m_lo, m_hi]. An excursion is bouncing when at least half
// of its interior collisions are on flat pieces.
BilliardTransitions billiard_transitions(const geometry::BilliardTable& table,
                                         const induced::ReducedSpace& spec, double m_lo,
                                         double m_hi, double delta, std::size_t pairs,
                                         const RunOptions& opts, std::size_t block = 4096);

// (m_k, m_{k+1}) pairs along surrogate trajectories.
std::vector<stats::TransitionPair> chain_transitions(const chain::SpreadingKernel& kernel,
                                                     std::size_t steps, std::size_t replicas,
                                                     const RunOptions& opts);

}  // namespace sdlab::experiments
