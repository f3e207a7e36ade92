#pragma once

#include <stdexcept>
#include <string>

namespace sbvsim {

/// Bad argument to a model or plan operation (out of domain, inconsistent sizes).
class invalid_parameter_error : public std::invalid_argument {
public:
    explicit invalid_parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Evaluation requested outside the range a model was fitted/validated for.
class model_range_error : public std::domain_error {
public:
    explicit model_range_error(const std::string& what) : std::domain_error(what) {}
};

/// A scenario that validates key-by-key but is not computable as a whole
/// (e.g. a spectrum region with zero active tones).
class invalid_scenario_error : public std::runtime_error {
public:
    explicit invalid_scenario_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or contradictory configuration text. Messages name the offending key.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sbvsim
