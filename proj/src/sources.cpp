#include "sdlab/sources.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace sdlab::sources {

namespace {

// Restart budget for billiard trajectories; singular hits have measure zero,
// so running out means something is wrong with the table.
constexpr std::uint64_t kMaxRestarts = 1000;

template <class Attempt>
GenerateStats with_restarts(std::uint64_t seed, Attempt&& attempt) {
    GenerateStats stats;
    for (std::uint64_t a = 0;; ++a) {
        try {
            attempt(a == 0 ? seed : split_seed(seed, 0x5eed0000ULL + a));
            return stats;
        } catch (const TangencyError&) {
        } catch (const CornerError&) {
        }
        if (++stats.restarts > kMaxRestarts) {
            throw IterationCapError("billiard source: too many singular restarts", kMaxRestarts);
        }
    }
}

}  // namespace

ChainSource::ChainSource(std::shared_ptr<const chain::SpreadingKernel> kernel, std::size_t burn_in,
                         std::vector<double> weights)
    : kernel_(std::move(kernel)), burn_in_(burn_in), weights_(std::move(weights)) {
    if (!kernel_) throw InvalidParameterError("ChainSource: null kernel");
    if (weights_.empty()) throw InvalidParameterError("ChainSource: need at least one copy");
}

std::string ChainSource::name() const {
    return kernel_->family() == chain::KernelFamily::linear ? "chain_linear" : "chain_algebraic";
}

std::vector<std::vector<chain::Cell>> ChainSource::trajectories(std::uint64_t seed,
                                                                std::size_t n) const {
    std::vector<std::vector<chain::Cell>> out;
    for (std::size_t c = 0; c < weights_.size(); ++c) {
        Rng rng(weights_.size() == 1 ? seed : split_seed(seed, c));
        out.push_back(chain::run_chain(*kernel_, n + 1, burn_in_, rng));
    }
    return out;
}

GenerateStats ChainSource::generate(std::uint64_t seed, std::size_t n,
                                    std::vector<double>& out) const {
    out.assign(n, 0.0);
    for (std::size_t c = 0; c < weights_.size(); ++c) {
        Rng rng(weights_.size() == 1 ? seed : split_seed(seed, c));
        chain::Cell m = kernel_->sample_stationary(rng);
        for (std::size_t i = 0; i < burn_in_; ++i) m = kernel_->sample_next(m, rng);
        for (std::size_t i = 0; i < n; ++i) {
            m = kernel_->sample_next(m, rng);
            out[i] += weights_[c] * static_cast<double>(m);
        }
    }
    return {};
}

GenerateStats InducedSource::excursions(std::uint64_t seed, std::size_t n,
                                        std::vector<Excursion>& out) const {
    const auto& s = *setup_;
    return with_restarts(seed, [&](std::uint64_t sd) {
        out.clear();
        out.reserve(n);
        Rng rng(sd);
        geometry::PhaseVec x = induced::sample_mu(s.table, s.spec, rng).x;
        for (std::size_t i = 0; i < n; ++i) {
            auto v = observables::induced_value(s.table, s.spec, s.f, x);
            x = v.sample.end;
            out.push_back({v.f_tilde, v.sample});
        }
    });
}

GenerateStats InducedSource::generate(std::uint64_t seed, std::size_t n,
                                      std::vector<double>& out) const {
    std::vector<Excursion> ex;
    const auto stats = excursions(seed, n, ex);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = ex[i].f_tilde;
    return stats;
}

GenerateStats TMapSource::generate(std::uint64_t seed, std::size_t n,
                                   std::vector<double>& out) const {
    const auto& s = *setup_;
    return with_restarts(seed, [&](std::uint64_t sd) {
        out.assign(n, 0.0);
        Rng rng(sd);
        induced::Orbit orbit(s.table, s.spec, geometry::sample_collision_measure(s.table, rng));
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = s.f(orbit.x(), orbit.in_M());
            if (j + 1 < n) orbit.step();
        }
    });
}

double standard_normal(Rng& rng) {
    constexpr double two_pi = 6.283185307179586476925;
    return std::sqrt(-2.0 * std::log(rng.uniform_open())) * std::cos(two_pi * rng.uniform());
}

GenerateStats GaussianSource::generate(std::uint64_t seed, std::size_t n,
                                       std::vector<double>& out) const {
    Rng rng(seed);
    out.resize(n);
    for (auto& v : out) v = standard_normal(rng);
    return {};
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void for_each_replica(std::size_t count, unsigned threads,
                      const std::function<void(std::size_t)>& body) {
    threads = std::max(1u, std::min<unsigned>(resolve_threads(threads),
                                               static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                if (failed.load()) return;
                const std::size_t r = next.fetch_add(1);
                if (r >= count) return;
                try {
                    body(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sdlab::sources
