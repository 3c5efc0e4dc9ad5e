#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "pacbound/environment.hpp"

namespace pacbound {

// Validation failure; `field` names the offending config entry.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& message)
        : std::runtime_error(message), field(std::move(f)) {}
};

// Non-finite result where a number was promised (e.g. a bound request with
// infinite KL).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named environments shipped with the tool; fully specified in the README
// so experiments are reproducible from the config alone. Throws
// std::invalid_argument for unknown names.
Environment preset_environment(const std::string& name);

// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Loads the config, runs its command, writes outputs. Returns the process
// exit code (0 ok; exceptions map to 1 = validation, 2 = numerical).
int run_experiment(const std::string& config_path, const Overrides& overrides = {});

} // namespace pacbound
