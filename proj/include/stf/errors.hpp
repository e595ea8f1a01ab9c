/**
 * @file errors.hpp
 * @brief Exception types shared by every module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace stf {

/** @brief Base class for all library errors. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** @brief An input violates an operation's precondition. */
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/** @brief Truncated data cannot decide the requested quantity. */
class PrecisionError : public Error {
public:
    explicit PrecisionError(const std::string& what) : Error(what) {}
};

/** @brief A configured size limit would be exceeded. */
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(what) {}
};

/** @brief A regularized sum has not stabilized below the configured depth cap. */
class StabilizationError : public Error {
public:
    explicit StabilizationError(const std::string& what) : Error(what) {}
};

/** @brief Malformed textual input. */
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace stf
