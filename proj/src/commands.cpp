#include "sdlab/commands.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "sdlab/csv.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/experiments.hpp"
#include "sdlab/observables.hpp"
#include "sdlab/stats.hpp"

namespace sdlab::commands {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using config::Model;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.out);
    return (fs::path(cfg.out) / file).string();
}

experiments::RunOptions run_options(const ExperimentConfig& cfg) {
    return {cfg.seed, cfg.threads};
}

std::string bin_label(double lo, double hi) {
    return "[" + csv::format_real(lo) + "," + csv::format_real(hi) + ")";
}

// Model mass of n in [n_lo, n_hi) given m, for a density k m / n^2.
std::function<double(double, double, double)> inverse_square_model(double k) {
    return [k](double m, double n_lo, double n_hi) {
        return k * m * (1.0 / n_lo - 1.0 / n_hi);
    };
}

std::vector<constants::ChannelTerm> lorentz_terms(const sources::BilliardSetup& s) {
    const auto avg = observables::channel_averages_lorentz(s.f, s.spec.channels);
    std::vector<constants::ChannelTerm> terms;
    for (std::size_t i = 0; i < s.spec.channels.size(); ++i) {
        const auto& c = s.spec.channels[i];
        terms.push_back({avg.a[i] * c.measure(), c.measure(), c.flight_length});
    }
    return terms;
}

}  // namespace

constants::DiffusionConstant billiard_constants(const ExperimentConfig& cfg,
                                                std::uint64_t mc_samples) {
    const auto s = config::billiard_setup(cfg);
    switch (cfg.model) {
        case Model::stadium:
            return constants::stadium_sigma2(observables::channel_integral(s->table, s->spec, s->f),
                                             cfg.l);
        case Model::drivebelt: {
            Rng rng(split_seed(cfg.seed, 0xd11e));
            const double mu =
                induced::measure_M_monte_carlo(s->table, s->spec, mc_samples, rng).value;
            return constants::drivebelt_sigma2(
                observables::channel_integral(s->table, s->spec, s->f), cfg.theta0, cfg.theta1,
                cfg.l, mu);
        }
        case Model::lorentz_case1: {
            auto d = constants::semidispersing_sigma2(
                lorentz_terms(*s), s->table.perimeter(),
                induced::measure_M_closed_form(s->table, s->spec),
                constants::Provenance::simulated);
            d.model = "lorentz_case1";
            return d;
        }
        default: break;
    }
    throw ConfigError("config key 'model': '" + config::to_string(cfg.model) +
                      "' has no billiard constants");
}

std::vector<constants::DiffusionConstant> constants_table(const ExperimentConfig& cfg) {
    std::vector<constants::DiffusionConstant> rows;
    for (Model m : {Model::stadium, Model::drivebelt, Model::lorentz_case1}) {
        ExperimentConfig c = cfg;
        c.model = m;
        rows.push_back(billiard_constants(c));
    }
    {
        // The same channels fed through the N-channel formula, as descriptors.
        ExperimentConfig c = cfg;
        c.model = Model::lorentz_case1;
        const auto s = config::billiard_setup(c);
        auto d = constants::semidispersing_sigma2(
            lorentz_terms(*s), s->table.perimeter(),
            induced::measure_M_closed_form(s->table, s->spec));
        d.model = "lorentz_case2";
        rows.push_back(d);
    }
    {
        // Reference cusp: unit mean curvature, unit-perimeter-normalised
        // walls, f = configured constant on both walls.
        const double value = cfg.observable.name == "constant" ? cfg.observable.c : 1.0;
        auto d = constants::cusp_sigma2([value](double) { return 2.0 * value; }, 1.0, 4.0);
        rows.push_back(d);
    }
    for (Model m : {Model::chain_linear, Model::chain_algebraic}) {
        ExperimentConfig c = cfg;
        c.model = m;
        constants::DiffusionConstant d;
        d.model = config::to_string(m);
        d.theta = m == Model::chain_linear ? chain::theta_linear(cfg.beta) : 0.0;
        d.c_M = d.c_M_f = d.mu_M_M = d.I_f = d.sigma2_induced = d.sigma2_original = kNaN;
        rows.push_back(d);
    }
    return rows;
}

std::vector<std::string> simulate(const ExperimentConfig& cfg, std::ostream& log) {
    const std::string path = out_path(cfg, "returns.csv");
    const std::size_t n = cfg.n;
    const std::size_t reps = cfg.replicas;
    struct Row {
        double m;
        std::uint64_t k;
        double f;
    };
    std::vector<std::vector<Row>> rows(reps);
    std::uint64_t restarts = 0;
    if (config::is_billiard(cfg.model)) {
        const sources::InducedSource src(config::billiard_setup(cfg));
        std::vector<std::uint64_t> rs(reps);
        sources::for_each_replica(reps, cfg.threads, [&](std::size_t r) {
            std::vector<sources::Excursion> ex;
            rs[r] = src.excursions(split_seed(cfg.seed, r), n, ex).restarts;
            for (const auto& e : ex) {
                rows[r].push_back({static_cast<double>(e.sample.R), e.sample.k, e.f_tilde});
            }
        });
        for (auto c : rs) restarts += c;
    } else {
        const sources::ChainSource src(config::make_kernel(cfg), cfg.burn_in, cfg.weights);
        sources::for_each_replica(reps, cfg.threads, [&](std::size_t r) {
            const auto tr = src.trajectories(split_seed(cfg.seed, r), n);
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t c = 0; c < tr.size(); ++c) {
                    v += cfg.weights[c] * static_cast<double>(tr[c][i]);
                }
                rows[r].push_back({static_cast<double>(tr[0][i]), 0, v});
            }
        });
    }
    csv::Writer w(path, {"replica", "step", "m", "k", "f_tilde"});
    for (std::size_t r = 0; r < reps; ++r) {
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            const auto& row = rows[r][i];
            w.row({std::uint64_t{r}, std::uint64_t{i}, row.m, row.k, row.f});
        }
    }
    log << "simulate: " << reps << " x " << n << " rows, " << restarts << " restarts -> " << path
        << "\n";
    return {path};
}

std::vector<std::string> tail(const ExperimentConfig& cfg, std::ostream& log) {
    const auto grid = stats::log_grid(cfg.tail_grid_lo, cfg.tail_grid_hi, cfg.tail_grid_points);
    stats::CountHistogram hist;
    std::uint64_t singular = 0;
    if (config::is_billiard(cfg.model)) {
        const auto s = config::billiard_setup(cfg);
        auto sample = experiments::return_time_histogram(s->table, s->spec, cfg.tail_samples,
                                                         run_options(cfg));
        hist = std::move(sample.histogram);
        singular = sample.singular;
    } else {
        // Tail of the reference law of the chain state.
        const auto kernel = config::make_kernel(cfg);
        const std::size_t block = 1u << 20;
        const std::size_t blocks = (cfg.tail_samples + block - 1) / block;
        std::vector<stats::CountHistogram> parts(blocks);
        sources::for_each_replica(blocks, cfg.threads, [&](std::size_t b) {
            Rng rng(split_seed(cfg.seed, b));
            const std::uint64_t todo = std::min<std::uint64_t>(block, cfg.tail_samples - b * block);
            for (std::uint64_t i = 0; i < todo; ++i) {
                parts[b].add(static_cast<std::uint64_t>(kernel->sample_stationary(rng)));
            }
        });
        for (const auto& p : parts) hist.merge(p);
    }
    Rng boot(split_seed(cfg.seed, 0xb007));
    const auto est = stats::tail_constant(hist, grid, &boot);
    const std::string path = out_path(cfg, "tail.csv");
    {
        csv::Writer w(path, {"n", "count", "prob", "n2prob"});
        for (std::size_t i = 0; i < est.grid.size(); ++i) {
            w.row({est.grid[i], est.counts[i], est.prob[i], est.n2prob[i]});
        }
    }
    const std::string summary = out_path(cfg, "tail_summary.csv");
    {
        csv::Writer w(summary, {"plateau", "ci_lo", "ci_hi", "extrapolated", "samples", "singular"});
        w.row({est.plateau, est.ci_lo, est.ci_hi, est.extrapolated, hist.total(), singular});
    }
    log << "tail: plateau " << est.plateau << " [" << est.ci_lo << ", " << est.ci_hi << "] from "
        << hist.total() << " samples\n";
    return {path, summary};
}

std::vector<std::string> transition(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<stats::TransitionPair> pairs;
    std::function<double(double, double, double)> model;
    std::shared_ptr<const chain::SpreadingKernel> kernel;
    if (config::is_billiard(cfg.model)) {
        const auto s = config::billiard_setup(cfg);
        auto t = experiments::billiard_transitions(s->table, s->spec, cfg.transition_m_lo,
                                                   cfg.transition_m_hi, cfg.transition_delta,
                                                   cfg.transition_pairs, run_options(cfg));
        pairs = std::move(t.bouncing);
        if (cfg.model == Model::stadium) model = inverse_square_model(3.0 / 8.0);
        if (cfg.model == Model::drivebelt) model = inverse_square_model(7.0 / 48.0);
        log << "transition: " << pairs.size() << " bouncing pairs, " << t.sliding
            << " sliding excursions, support violations bouncing " << t.bouncing_violations
            << " sliding " << t.sliding_violations << "\n";
    } else {
        kernel = config::make_kernel(cfg);
        pairs = experiments::chain_transitions(*kernel, cfg.n, cfg.replicas, run_options(cfg));
        model = [kernel](double m, double n_lo, double n_hi) {
            const auto cell = static_cast<chain::Cell>(std::llround(m));
            return kernel->partial_moments(cell, static_cast<chain::Cell>(std::ceil(n_lo)),
                                           static_cast<chain::Cell>(std::ceil(n_hi)) - 1)
                .mass;
        };
        log << "transition: " << pairs.size() << " chain pairs\n";
    }
    const auto m_edges = stats::relative_bins(cfg.transition_m_lo, cfg.transition_m_hi, 0.2);
    const auto n_edges = stats::relative_bins(std::max(1.0, cfg.transition_m_lo / 4.0),
                                              4.0 * m_edges.back(), 0.1);
    const auto est = stats::transition_estimate(pairs, m_edges, n_edges, model);
    const std::string path = out_path(cfg, "kernel.csv");
    csv::Writer w(path, {"m_bin", "n", "p_hat", "stderr", "model_p"});
    for (const auto& c : est.cells) {
        w.row({bin_label(c.m_lo, c.m_hi), std::sqrt(c.n_lo * c.n_hi), c.p_hat, c.stderr_,
               model ? c.model_p : kNaN});
    }
    return {path};
}

std::vector<std::string> clt(const ExperimentConfig& cfg, std::ostream& log) {
    const auto source = config::make_source(cfg);
    experiments::CltSpec spec;
    spec.n = cfg.n;
    spec.replicas = cfg.replicas;
    if (cfg.normalizer == "closed_form") {
        if (!config::is_billiard(cfg.model)) {
            throw ConfigError(
                "config key 'clt.normalizer': closed_form needs a billiard model");
        }
        spec.normalizer = experiments::Normalizer::closed_form;
        spec.c_M_f = billiard_constants(cfg).c_M_f;
    }
    const auto res = experiments::clt_experiment(*source, spec, run_options(cfg));
    const std::string values = out_path(cfg, "clt.csv");
    {
        csv::Writer w(values, {"replica", "value"});
        for (std::size_t r = 0; r < res.values.size(); ++r) w.row({std::uint64_t{r}, res.values[r]});
    }
    const std::string summary = out_path(cfg, "clt_summary.csv");
    {
        csv::Writer w(summary, {"D", "mean", "var", "skew", "kurt", "normalizer"});
        w.row({res.D, res.moments.mean, res.moments.variance, res.moments.skewness,
               res.moments.kurtosis, res.normalizer});
    }
    log << "clt: D = " << res.D << ", var = " << res.moments.variance << ", H = " << res.H
        << ", restarts " << res.restarts << "\n";
    return {values, summary};
}

std::vector<std::string> ip(const ExperimentConfig& cfg, std::ostream& log) {
    const auto source = config::make_source(cfg);
    experiments::PathSpec spec;
    spec.n = cfg.n;
    spec.replicas = cfg.replicas;
    spec.t_grid = cfg.t_grid;
    const auto res = experiments::path_experiment(*source, spec, run_options(cfg));
    const std::string paths = out_path(cfg, "paths.csv");
    {
        csv::Writer w(paths, {"replica", "t", "W"});
        for (std::size_t r = 0; r < spec.replicas; ++r) {
            for (std::size_t i = 0; i < res.t.size(); ++i) {
                w.row({std::uint64_t{r}, res.t[i], res.W[i][r]});
            }
        }
    }
    const std::string diag = out_path(cfg, "ip_increments.csv");
    {
        csv::Writer w(diag, {"i", "j", "t_i", "t_j", "rho"});
        const std::size_t g = res.t.size();
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = i + 1; j < g; ++j) {
                w.row({std::uint64_t{i}, std::uint64_t{j}, res.t[i], res.t[j],
                       res.increment_corr[i * g + j]});
            }
        }
    }
    const std::string summary = out_path(cfg, "ip_summary.csv");
    {
        csv::Writer w(summary, {"t", "variance", "ks_scaled"});
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            w.row({res.t[i], res.variance[i], res.ks[i]});
        }
    }
    log << "ip: variance slope / Var W(1) - 1 = " << res.variance_fit.slope / res.variance.back() - 1.0
        << ", max |rho| = " << res.max_abs_increment_corr << "\n";
    return {paths, diag, summary};
}

std::vector<std::string> constants_report(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = constants_table(cfg);
    const std::string path = out_path(cfg, "constants.csv");
    csv::Writer w(path, {"model", "theta", "c_M", "mu_M_M", "sigma2_induced", "sigma2_original",
                         "provenance"});
    for (const auto& d : rows) {
        w.row({d.model, d.theta, d.c_M_f, d.mu_M_M, d.sigma2_induced, d.sigma2_original,
               constants::to_string(d.provenance)});
        if (!d.warning.empty()) log << "constants: " << d.model << ": " << d.warning << "\n";
    }
    log << "constants: " << rows.size() << " rows -> " << path << "\n";
    return {path};
}

int exit_code_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidParameterError& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IterationCapError& e) {
        err << "iteration cap exceeded (" << e.cap() << "): " << e.what() << "\n";
        return kExitCap;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sdlab::commands
