// Acceptance driver: runs the criteria given as arguments (all by default)
// and prints one pass/fail line per criterion. Exit status 0 only when every
// criterion passed.

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <thread>

#include "harmonic/selftest.hpp"

int main(int argc, char** argv) {
    std::set<int> which;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "-j" && i + 1 < argc) {
            jobs = static_cast<unsigned>(std::stoul(argv[++i]));
        } else {
            which.insert(std::atoi(arg.c_str()));
        }
    }
    const auto results = harmonic::run_acceptance(std::cout, jobs, which);
    bool all_pass = !results.empty();
    for (const auto& r : results) all_pass = all_pass && r.pass;
    return all_pass ? 0 : 1;
}
