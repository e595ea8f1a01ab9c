/**
 * @file cli.hpp
 * @brief Command implementations behind the `stf` executable: run configuration,
 *        element and label parsing, and deterministic JSON/CSV rendering.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "json.hpp"
#include "stf/charform.hpp"
#include "stf/cyclotomic.hpp"
#include "stf/errors.hpp"
#include "stf/verify.hpp"

namespace stf {

enum class OutputFormat { Json, Csv };

/** @brief Residue field F_{p^k}, torus degree n, precision and run controls. */
struct RunConfig {
    uint32_t p = 5;
    uint32_t k = 1;
    uint32_t n = 3;
    int64_t prec = 12;
    int64_t depth_cap = 4;
    OutputFormat format = OutputFormat::Json;
    uint64_t seed = 1;
    SignConvention conv = SignConvention::Table;
    unsigned jobs = 1;
};

/** @brief Raised for invalid configurations and command-line input (exit code 2). */
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

/** @brief Checks p prime, p > n, n ≤ 8, prec ≥ 2·depth_cap + 4, jobs ≥ 1. */
void validate(const RunConfig& cfg);
OutputFormat parse_format(const std::string& text);

/** @brief {"modulus", "coefficients", "denominator", "text"}. */
nlohmann::json to_json(const CycNumber& x);
/** @brief Inverse of to_json. */
CycNumber cyc_from_json(const nlohmann::json& j);

/** @brief Result of one command: rendered output and process exit code. */
struct CommandOutput {
    std::string text;
    int exit_code = 0;
};

/** @brief Depth report for a torus element or a matrix literal "[[a, b], [c, d]]". */
CommandOutput cmd_depth(const RunConfig& cfg, const std::string& gamma);
/** @brief Θ_ψ(γ) from the table and from the conjectural formula. */
CommandOutput cmd_theta(const RunConfig& cfg, const std::string& psi_label, const std::string& gamma);
/** @brief L(γ,t): mode brute, closed or both. */
CommandOutput cmd_transfer(const RunConfig& cfg, const std::string& gamma, const std::string& t,
                           const std::string& mode);
/** @brief Runs one suite (name or number) or "all"; exit 0 when every suite passes, 1 otherwise. */
CommandOutput cmd_verify(const RunConfig& cfg, const std::string& suite, bool restrict_field,
                         const std::string& artifact_dir);

}  // namespace stf
