#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hskdv {

// bad input, bad geometry, bad key
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// factorization trouble, non-finite values
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// iteration did not settle; history is whatever was recorded before giving up
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> hist)
        : std::runtime_error(what), history(std::move(hist)) {}
    std::vector<double> history;
};

} // namespace hskdv
