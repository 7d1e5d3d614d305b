#include "sdlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sdlab/constants.hpp"
#include "sdlab/errors.hpp"

namespace sdlab::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("config key '" + key + "': expected a real number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" +
                          text + "'");
    }
    return v;
}

const std::set<std::string> kKnownKeys = {
    "model",          "model.l",         "model.theta0",      "model.theta1",
    "model.l1",       "model.l2",        "model.scatterers",  "model.iteration_cap",
    "model.beta",     "model.m_max",     "model.burn_in",     "model.weights",
    "observable",     "observable.c",    "observable.amp",    "observable.periods",
    "observable.width", "n",             "replicas",          "seed",
    "threads",        "t_grid",          "out",               "clt.normalizer",
    "tail.samples",   "tail.grid_lo",    "tail.grid_hi",      "tail.grid_points",
    "transition.m_lo", "transition.m_hi", "transition.delta", "transition.pairs",
};

}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv.values_[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_u64(key, it->second);
}

std::vector<double> KeyValues::get_doubles(const std::string& key,
                                           std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::string to_string(Model m) {
    switch (m) {
        case Model::stadium: return "stadium";
        case Model::drivebelt: return "drivebelt";
        case Model::lorentz_case1: return "lorentz_case1";
        case Model::chain_linear: return "chain_linear";
        case Model::chain_algebraic: return "chain_algebraic";
    }
    return "?";
}

bool is_billiard(Model m) {
    return m == Model::stadium || m == Model::drivebelt || m == Model::lorentz_case1;
}

std::vector<geometry::Disk> parse_disks(const std::string& text) {
    std::vector<geometry::Disk> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (trim(item).empty()) continue;
        std::stringstream parts(item);
        std::string x, y, r;
        if (!std::getline(parts, x, ',') || !std::getline(parts, y, ',') ||
            !std::getline(parts, r, ',')) {
            throw ConfigError("config key 'model.scatterers': expected 'x,y,r; ...', got '" +
                              item + "'");
        }
        out.push_back({{parse_double("model.scatterers", x), parse_double("model.scatterers", y)},
                       parse_double("model.scatterers", r)});
    }
    return out;
}

ExperimentConfig from_key_values(const KeyValues& kv) {
    for (const auto& [key, value] : kv.values()) {
        if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    const std::string model = kv.get_string("model", "stadium");
    if (model == "stadium") c.model = Model::stadium;
    else if (model == "drivebelt") c.model = Model::drivebelt;
    else if (model == "lorentz_case1") c.model = Model::lorentz_case1;
    else if (model == "chain_linear") c.model = Model::chain_linear;
    else if (model == "chain_algebraic") c.model = Model::chain_algebraic;
    else throw ConfigError("config key 'model': unknown model '" + model + "'");

    c.l = kv.get_double("model.l", c.l);
    c.theta0 = kv.get_double("model.theta0", c.theta0);
    c.theta1 = kv.get_double("model.theta1", c.theta1);
    c.l1 = kv.get_double("model.l1", c.l1);
    c.l2 = kv.get_double("model.l2", c.l2);
    if (kv.has("model.scatterers")) c.scatterers = parse_disks(kv.get_string("model.scatterers", ""));
    c.iteration_cap = kv.get_u64("model.iteration_cap", c.iteration_cap);
    c.beta = kv.get_double("model.beta", c.beta);
    c.m_max = static_cast<std::int64_t>(kv.get_u64("model.m_max", static_cast<std::uint64_t>(c.m_max)));
    c.burn_in = kv.get_u64("model.burn_in", c.burn_in);
    c.weights = kv.get_doubles("model.weights", c.weights);

    c.observable.name = kv.get_string("observable", c.observable.name);
    static const std::set<std::string> kObservables = {"constant", "sinusoid", "bump",
                                                       "return_indicator"};
    if (!kObservables.count(c.observable.name)) {
        throw ConfigError("config key 'observable': unknown observable '" + c.observable.name + "'");
    }
    c.observable.c = kv.get_double("observable.c", c.observable.c);
    c.observable.amp = kv.get_double("observable.amp", c.observable.amp);
    c.observable.periods = static_cast<int>(kv.get_u64("observable.periods", 1));
    c.observable.width = kv.get_double("observable.width", c.observable.width);

    c.n = kv.get_u64("n", c.n);
    c.replicas = kv.get_u64("replicas", c.replicas);
    c.seed = kv.get_u64("seed", c.seed);
    c.threads = static_cast<unsigned>(kv.get_u64("threads", c.threads));
    c.t_grid = kv.get_doubles("t_grid", c.t_grid);
    c.out = kv.get_string("out", c.out);
    c.normalizer = kv.get_string("clt.normalizer", c.normalizer);
    if (c.normalizer != "empirical" && c.normalizer != "closed_form") {
        throw ConfigError("config key 'clt.normalizer': expected 'empirical' or 'closed_form'");
    }
    c.tail_samples = kv.get_u64("tail.samples", c.tail_samples);
    c.tail_grid_lo = kv.get_double("tail.grid_lo", c.tail_grid_lo);
    c.tail_grid_hi = kv.get_double("tail.grid_hi", c.tail_grid_hi);
    c.tail_grid_points = static_cast<int>(kv.get_u64("tail.grid_points", 16));
    c.transition_m_lo = kv.get_double("transition.m_lo", c.transition_m_lo);
    c.transition_m_hi = kv.get_double("transition.m_hi", c.transition_m_hi);
    c.transition_delta = kv.get_double("transition.delta", c.transition_delta);
    c.transition_pairs = kv.get_u64("transition.pairs", c.transition_pairs);

    if (c.n < 1) throw ConfigError("config key 'n': must be >= 1");
    if (c.replicas < 1) throw ConfigError("config key 'replicas': must be >= 1");
    return c;
}

namespace {

geometry::BilliardTable build_table(const ExperimentConfig& cfg) {
    switch (cfg.model) {
        case Model::stadium: return geometry::build_stadium(cfg.l);
        case Model::drivebelt: return geometry::build_drivebelt(cfg.theta0, cfg.theta1, cfg.l);
        case Model::lorentz_case1: return geometry::build_lorentz(cfg.l1, cfg.l2, cfg.scatterers);
        default: break;
    }
    throw ConfigError("config key 'model': '" + to_string(cfg.model) + "' is not a billiard");
}

}  // namespace

std::shared_ptr<const sources::BilliardSetup> billiard_setup(const ExperimentConfig& cfg) {
    auto s = std::make_shared<sources::BilliardSetup>();
    s->table = build_table(cfg);
    s->spec = induced::default_reduced_space(s->table);
    s->spec.iteration_cap = cfg.iteration_cap;
    std::optional<double> measure;
    switch (cfg.model) {
        case Model::stadium:
            s->theta = constants::theta_stadium();
            measure = induced::measure_M_closed_form(s->table, s->spec);
            break;
        case Model::drivebelt:
            s->theta = constants::theta_drivebelt();
            break;
        default:
            s->theta = 0.0;
            measure = induced::measure_M_closed_form(s->table, s->spec);
            break;
    }
    const auto& o = cfg.observable;
    const auto set = induced::channel_set(s->table, s->spec);
    // mu_M(f), used with Kac to centre f_tilde: mu(f_tilde) = mu_M(f) / mu_M(M).
    double mu_f = 0.0;
    if (o.name == "constant") {
        s->f = observables::constant(o.c);
        mu_f = o.c;
    } else if (o.name == "sinusoid") {
        s->f = observables::sinusoid_on_channels(set, o.amp, o.periods);
        mu_f = 0.0;
    } else if (o.name == "bump") {
        s->f = observables::bump_on_channels(set, o.amp, o.width);
        double len = 0.0;
        for (const auto& a : set) len += a.length();
        const double w = o.width;
        const double angular = observables::simpson(
            [w](double p) { return std::exp(-p * p / (2.0 * w * w)) * std::cos(p); },
            -0.5 * geometry::kPi, 0.5 * geometry::kPi, 8192);
        mu_f = o.amp * 2.0 * len / geometry::kPi * angular / (2.0 * s->table.perimeter());
    } else {
        if (!measure) {
            throw ConfigError(
                "config key 'observable': return_indicator needs a closed-form measure of M, "
                "which this model lacks");
        }
        s->f = observables::return_indicator(*measure);
        mu_f = 0.0;
    }
    if (measure) s->mean = mu_f / *measure;
    else if (mu_f == 0.0) s->mean = 0.0;
    return s;
}

std::shared_ptr<const chain::SpreadingKernel> make_kernel(const ExperimentConfig& cfg) {
    if (cfg.model == Model::chain_linear) {
        return std::make_shared<const chain::SpreadingKernel>(
            chain::build_linear_kernel(cfg.beta, cfg.m_max));
    }
    if (cfg.model == Model::chain_algebraic) {
        return std::make_shared<const chain::SpreadingKernel>(
            chain::build_algebraic_kernel(cfg.m_max));
    }
    throw ConfigError("config key 'model': '" + to_string(cfg.model) + "' is not a chain");
}

std::shared_ptr<const sources::ValueSource> make_source(const ExperimentConfig& cfg) {
    if (is_billiard(cfg.model)) {
        return std::make_shared<const sources::InducedSource>(billiard_setup(cfg));
    }
    return std::make_shared<const sources::ChainSource>(make_kernel(cfg), cfg.burn_in, cfg.weights);
}

}  // namespace sdlab::config
