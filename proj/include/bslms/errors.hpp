#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bslms {

/// Vector length does not match the configured filter or group partition.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter lies outside the domain of an operation (e.g. the step-size
/// bound, an unsupported incomplete-gamma order).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite input sample or observation fed to the filter.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The closed-form theory left its approximation regime (β1 <= β2, no
/// positive ω root, ...).
class DegenerateTheoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A tap weight became non-finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::uint64_t iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}

    std::uint64_t iteration() const noexcept { return iteration_; }

private:
    std::uint64_t iteration_;
};

/// Divergence inside a Monte Carlo trial; carries enough to replay it.
class TrialDivergedError : public DivergenceError {
public:
    TrialDivergedError(std::uint64_t iteration, std::size_t system, std::size_t trial,
                       std::uint64_t trial_seed, const std::string& what)
        : DivergenceError(iteration, what), system_(system), trial_(trial), seed_(trial_seed) {}

    std::size_t system() const noexcept { return system_; }
    std::size_t trial() const noexcept { return trial_; }
    std::uint64_t trial_seed() const noexcept { return seed_; }

private:
    std::size_t system_;
    std::size_t trial_;
    std::uint64_t seed_;
};

/// Invalid configuration value; `field()` is the dotted path (e.g. "model.p1").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace bslms
