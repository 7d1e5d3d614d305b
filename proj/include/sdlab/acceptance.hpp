#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace sdlab::acceptance {

struct Options {
    std::uint64_t seed = 20240601;
    unsigned threads = 1;
    std::set<int> only;  // empty = all criteria
};

struct Outcome {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriteria = 14;

// Runs the acceptance criteria in order and prints one PASS/FAIL line for
// each as it finishes.
std::vector<Outcome> run(const Options& opts, std::ostream& out);

}  // namespace sdlab::acceptance
