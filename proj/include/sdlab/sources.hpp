#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdlab/induced.hpp"
#include "sdlab/observables.hpp"
#include "sdlab/spreading_chain.hpp"

namespace sdlab::sources {

struct GenerateStats {
    std::uint64_t restarts = 0;  // singular hits that forced a fresh start
};

// A stationary real-valued process. generate() writes n consecutive values
// of one trajectory whose start is drawn from the stationary law with the
// given seed; it is const and safe to call from many threads.
class ValueSource {
public:
    virtual ~ValueSource() = default;
    virtual std::string name() const = 0;
    virtual GenerateStats generate(std::uint64_t seed, std::size_t n,
                                   std::vector<double>& out) const = 0;
    // theta of the one-step conditional-mean law.
    virtual double theta() const { return 0.0; }
    // Exact stationary mean when known.
    virtual std::optional<double> known_mean() const { return std::nullopt; }
};

// Surrogate chain. The value is sum_k a_k m^(k) over independent copies
// (weights `a`, default a single copy with weight 1), each started from the
// m^-3 reference law followed by `burn_in` discarded steps.
class ChainSource : public ValueSource {
public:
    ChainSource(std::shared_ptr<const chain::SpreadingKernel> kernel, std::size_t burn_in = 10'000,
                std::vector<double> weights = {1.0});
    std::string name() const override;
    GenerateStats generate(std::uint64_t seed, std::size_t n,
                           std::vector<double>& out) const override;
    double theta() const override { return kernel_->theta(); }
    const chain::SpreadingKernel& kernel() const { return *kernel_; }
    // Cell trajectories (one per copy) of n + 1 states.
    std::vector<std::vector<chain::Cell>> trajectories(std::uint64_t seed, std::size_t n) const;

private:
    std::shared_ptr<const chain::SpreadingKernel> kernel_;
    std::size_t burn_in_;
    std::vector<double> weights_;
};

struct Excursion {
    double f_tilde = 0.0;
    induced::ReturnSample sample;
};

// Billiard setup shared by the two billiard sources.
struct BilliardSetup {
    geometry::BilliardTable table;
    induced::ReducedSpace spec;
    observables::Observable f;
    double theta = 0.0;
    std::optional<double> mean;  // mu(f_tilde)
};

// Induced process f_tilde o F^k, k = 0..n-1, from x ~ mu. A singular
// collision restarts the trajectory from a fresh draw on a derived stream.
class InducedSource : public ValueSource {
public:
    explicit InducedSource(std::shared_ptr<const BilliardSetup> setup) : setup_(std::move(setup)) {}
    std::string name() const override { return "induced"; }
    GenerateStats generate(std::uint64_t seed, std::size_t n,
                           std::vector<double>& out) const override;
    double theta() const override { return setup_->theta; }
    std::optional<double> known_mean() const override { return setup_->mean; }
    GenerateStats excursions(std::uint64_t seed, std::size_t n, std::vector<Excursion>& out) const;

private:
    std::shared_ptr<const BilliardSetup> setup_;
};

// Original process f o T^j, j = 0..n-1, from y drawn from the collision measure.
class TMapSource : public ValueSource {
public:
    explicit TMapSource(std::shared_ptr<const BilliardSetup> setup) : setup_(std::move(setup)) {}
    std::string name() const override { return "billiard_map"; }
    GenerateStats generate(std::uint64_t seed, std::size_t n,
                           std::vector<double>& out) const override;

private:
    std::shared_ptr<const BilliardSetup> setup_;
};

// i.i.d. N(0, 1) (Box-Muller on the project RNG).
class GaussianSource : public ValueSource {
public:
    std::string name() const override { return "gaussian"; }
    GenerateStats generate(std::uint64_t seed, std::size_t n,
                           std::vector<double>& out) const override;
    std::optional<double> known_mean() const override { return 0.0; }
};

double standard_normal(Rng& rng);

// Runs body(r) for r in [0, count) on `threads` workers. Results must be
// stored by index; the first exception is rethrown after all workers stop.
void for_each_replica(std::size_t count, unsigned threads,
                      const std::function<void(std::size_t)>& body);

// Resolved worker count: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace sdlab::sources
