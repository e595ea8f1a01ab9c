/**
 * @file verify.hpp
 * @brief Verification suites: one exact check per acceptance criterion, with counterexample dumps.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stf/charform.hpp"

namespace stf {

struct VerifyConfig {
    uint64_t seed = 1;
    unsigned jobs = 1;
    SignConvention conv = SignConvention::Table;
    /** @brief Directory for report artifacts; empty disables writing. */
    std::string artifact_dir;
    /** @brief Restrict suites with a parameter list to this (p, n), when given. */
    std::optional<std::pair<uint32_t, uint32_t>> field;
};

struct SuiteResult {
    int id = 0;
    std::string name;
    bool pass = false;
    uint64_t checks = 0;
    std::string summary;
    std::vector<std::string> counterexamples;  ///< first failures, capped
    std::vector<std::string> notes;            ///< report lines that are not assertions
    std::vector<std::string> artifacts;        ///< files written
    double seconds = 0;
};

/** @brief Suite names in criterion order (index + 1 is the criterion number). */
const std::vector<std::string>& suite_names();
/** @brief Criterion number of a suite name or of its decimal id; ParseError when unknown. */
int suite_id(const std::string& name);
SuiteResult run_suite(int id, const VerifyConfig& cfg);

}  // namespace stf
