/**
 * @file acceptance.cpp
 * @brief Acceptance driver: runs one criterion (by number) or all twelve and prints one PASS/FAIL line each.
 */
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "stf/errors.hpp"
#include "stf/verify.hpp"

namespace {

constexpr unsigned kJobs = 4;

bool run_one(int id, const stf::VerifyConfig& cfg) {
    const stf::SuiteResult r = stf::run_suite(id, cfg);
    std::cout << "Criterion " << r.id << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL") << " - "
              << r.summary << "\n";
    for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
    for (const auto& c : r.counterexamples) std::cout << "  counterexample: " << c << "\n";
    for (const auto& a : r.artifacts) std::cout << "  artifact: " << a << "\n";
    return r.pass;
}

}  // namespace

int main(int argc, char** argv) {
    stf::VerifyConfig cfg;
    cfg.seed = 1;
    cfg.jobs = kJobs;
    cfg.artifact_dir = "acceptance_artifacts";
    std::filesystem::create_directories(cfg.artifact_dir);
    try {
        if (argc > 1) return run_one(stf::suite_id(argv[1]), cfg) ? EXIT_SUCCESS : EXIT_FAILURE;
        bool all = true;
        for (size_t i = 1; i <= stf::suite_names().size(); ++i) all = run_one(int(i), cfg) && all;
        return all ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const stf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
