// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit on any failure.
// Usage: sdlab_acceptance [criterion ...]; SDLAB_SEED and SDLAB_THREADS apply.
#include <cstdlib>
#include <iostream>
#include <string>

#include "sdlab/acceptance.hpp"

int main(int argc, char** argv) {
    sdlab::acceptance::Options opts;
    if (const char* s = std::getenv("SDLAB_SEED")) opts.seed = std::stoull(s);
    if (const char* t = std::getenv("SDLAB_THREADS")) opts.threads = static_cast<unsigned>(std::stoul(t));
    for (int i = 1; i < argc; ++i) opts.only.insert(std::stoi(argv[i]));
    const auto results = sdlab::acceptance::run(opts, std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << (static_cast<int>(results.size()) - failed) << "/" << results.size()
              << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
