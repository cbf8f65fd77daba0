#pragma once

#include <stdexcept>
#include <string>

namespace seqpyr {

// Invalid run/topology configuration detected before any simulation work.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Structural violation of the pyramid wiring (fan-in mismatch, bad edge).
class topology_error : public std::runtime_error {
public:
    explicit topology_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or missing per-tick input.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation applied to an agent in standby.
class standby_error : public std::logic_error {
public:
    explicit standby_error(const std::string& what) : std::logic_error(what) {}
};

// Operation whose result is undefined for the given input (e.g. both
// sequences empty in a similarity ratio).
class undefined_input_error : public std::invalid_argument {
public:
    explicit undefined_input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Filesystem failure while emitting results.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqpyr
