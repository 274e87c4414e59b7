#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loggas {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation outside a function's domain (e.g. log-singular potential at the origin).
struct domain_error : error {
    explicit domain_error(const std::string& what) : error(what) {}
};

// Invalid input state or parameters (unordered particles, bad grid, ...).
struct invalid_argument : error {
    explicit invalid_argument(const std::string& what) : error(what) {}
};

// A trajectory produced a non-finite value; carries the step index at which it happened.
struct explosion_error : error {
    std::size_t step_index;
    explicit explosion_error(std::size_t step, const std::string& what)
        : error(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
};

// The adaptive mean-field step could not preserve particle ordering after the
// maximum number of time-step halvings.
struct stiffness_error : error {
    explicit stiffness_error(const std::string& what) : error(what) {}
};

// Configuration validation failure; carries the dotted path of the offending field.
struct config_error : error {
    std::string field;
    config_error(std::string field_path, const std::string& what)
        : error(field_path + ": " + what), field(std::move(field_path)) {}
};

// Replay verification failure; carries the first differing file and row.
struct replay_mismatch : error {
    std::string file;
    std::size_t row; // 1-based line number, 0 if not line-resolved
    replay_mismatch(std::string f, std::size_t r, const std::string& what)
        : error(what), file(std::move(f)), row(r) {}
};

} // namespace loggas
