#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdlab/geometry.hpp"
#include "sdlab/sources.hpp"

namespace sdlab::config {

// Flat `key = value` document. `#` starts a comment; blank lines are
// ignored; keys may be dotted (`model.l`). Later keys override earlier ones.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& origin = "config");
    static KeyValues load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

private:
    std::map<std::string, std::string> values_;
};

enum class Model { stadium, drivebelt, lorentz_case1, chain_linear, chain_algebraic };
std::string to_string(Model m);
bool is_billiard(Model m);

struct ObservableSpec {
    std::string name = "constant";  // constant | sinusoid | bump | return_indicator
    double c = 1.0;
    double amp = 1.0;
    int periods = 1;
    double width = 0.05;
};

struct ExperimentConfig {
    Model model = Model::stadium;
    // billiards
    double l = 1.0;
    double theta0 = 7.0 * geometry::kPi / 6.0;
    double theta1 = geometry::kPi / 6.0;
    double l1 = 2.0;
    double l2 = 2.0;
    std::vector<geometry::Disk> scatterers{{{1.0, 1.0}, 0.5}, {{0.0, 0.0}, 0.5}, {{2.0, 0.0}, 0.5}};
    std::uint64_t iteration_cap = 1'000'000'000ULL;
    // chains
    double beta = 3.0;
    std::int64_t m_max = 1'000'000;
    std::uint64_t burn_in = 10'000;
    std::vector<double> weights{1.0};

    ObservableSpec observable;

    std::uint64_t n = 1000;
    std::uint64_t replicas = 1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::vector<double> t_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::string out = ".";

    std::string normalizer = "empirical";  // empirical | closed_form

    std::uint64_t tail_samples = 1'000'000;
    double tail_grid_lo = 50.0;
    double tail_grid_hi = 500.0;
    int tail_grid_points = 16;

    double transition_m_lo = 100.0;
    double transition_m_hi = 300.0;
    double transition_delta = 0.01;
    std::uint64_t transition_pairs = 10'000;
};

// Throws ConfigError naming the offending key for unknown keys, malformed
// values, or an unknown model/observable name.
ExperimentConfig from_key_values(const KeyValues& kv);

// Disks as "x,y,r; x,y,r; ...".
std::vector<geometry::Disk> parse_disks(const std::string& text);

// Built objects for a billiard model.
std::shared_ptr<const sources::BilliardSetup> billiard_setup(const ExperimentConfig& cfg);
// Source for the configured model.
std::shared_ptr<const sources::ValueSource> make_source(const ExperimentConfig& cfg);
std::shared_ptr<const chain::SpreadingKernel> make_kernel(const ExperimentConfig& cfg);

}  // namespace sdlab::config
