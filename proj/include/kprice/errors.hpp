#pragma once

#include <stdexcept>
#include <string>

namespace kprice {

// Bad user input: unknown family, k > n, non-monotone table, malformed file.
class invalid_argument_error : public std::invalid_argument {
public:
    explicit invalid_argument_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Evaluation outside a distribution's or strategy's domain.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& msg) : std::domain_error(msg) {}
};

// A numeric routine could not meet its accuracy contract.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / serialization failures.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kprice
