#pragma once

// Acceptance suite: end-to-end checks of the published set data, the
// dual-route enumerations, the counting bounds, the split identity, the
// density measurement and cross-parallelism determinism. Each criterion
// prints one pass/fail line.

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace harmonic {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the listed criteria (all eight when `which` is empty) at the given
// worker count, streaming one result line per criterion to `progress`.
std::vector<CriterionResult> run_acceptance(std::ostream& progress, unsigned jobs = 1,
                                            const std::set<int>& which = {});

} // namespace harmonic
