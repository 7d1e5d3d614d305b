#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdlab/acceptance.hpp"
#include "sdlab/commands.hpp"
#include "sdlab/config.hpp"
#include "sdlab/errors.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    std::vector<std::string> set;
    std::vector<int> only;
};

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

// Config file, then --set pairs, then environment, then explicit flags.
sdlab::config::ExperimentConfig resolve(const Flags& f) {
    using sdlab::config::KeyValues;
    KeyValues kv = f.config.empty() ? KeyValues{} : KeyValues::load(f.config);
    for (const auto& s : f.set) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw sdlab::ConfigError("--set expects key=value, got '" + s + "'");
        kv.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (auto v = env("SDLAB_SEED")) kv.set("seed", *v);
    if (auto v = env("SDLAB_THREADS")) kv.set("threads", *v);
    if (f.seed) kv.set("seed", std::to_string(*f.seed));
    if (f.threads) kv.set("threads", std::to_string(*f.threads));
    if (f.out) kv.set("out", *f.out);
    return sdlab::config::from_key_values(kv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdlab: superdiffusion experiments for billiards and spreading chains"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--set", flags.set, "override a config key (key=value), repeatable");
    };

    using Command = std::vector<std::string> (*)(const sdlab::config::ExperimentConfig&,
                                                 std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands = {
        {"simulate", "induced trajectories -> returns.csv", sdlab::commands::simulate},
        {"tail", "return-time tail -> tail.csv", sdlab::commands::tail},
        {"transition", "return-time transitions -> kernel.csv", sdlab::commands::transition},
        {"clt", "normalised sums -> clt.csv, clt_summary.csv", sdlab::commands::clt},
        {"ip", "partial-sum paths -> paths.csv", sdlab::commands::ip},
        {"constants", "diffusion constants -> constants.csv", sdlab::commands::constants_report},
    };
    Command chosen = nullptr;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&chosen, fn = fn] { chosen = fn; });
    }
    bool verify = false;
    auto* v = app.add_subcommand("verify", "run the acceptance suite");
    add_common(v);
    v->add_option("--only", flags.only, "criterion numbers to run");
    v->callback([&] { verify = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sdlab::commands::kExitConfig;
    }

    try {
        const auto cfg = resolve(flags);
        if (verify) {
            sdlab::acceptance::Options opts;
            if (flags.seed || env("SDLAB_SEED")) opts.seed = cfg.seed;
            opts.threads = cfg.threads;
            opts.only.insert(flags.only.begin(), flags.only.end());
            const auto results = sdlab::acceptance::run(opts, std::cout);
            std::size_t failed = 0;
            for (const auto& r : results) failed += r.pass ? 0 : 1;
            std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
            return failed ? sdlab::commands::kExitAcceptance : sdlab::commands::kExitOk;
        }
        chosen(cfg, std::cout);
        return sdlab::commands::kExitOk;
    } catch (...) {
        return sdlab::commands::exit_code_for_current_exception(std::cerr);
    }
}
