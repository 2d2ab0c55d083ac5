#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dice {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvariantViolation : public Error {
public:
    using Error::Error;
};

class MalformedFrame : public Error {
public:
    using Error::Error;
};

class ConnectionFailed : public Error {
public:
    using Error::Error;
};

class DuplicateMachine : public Error {
public:
    DuplicateMachine(std::uint32_t machine_id, const std::string& what)
        : Error(what), machine_id_(machine_id) {}
    std::uint32_t machine_id() const noexcept { return machine_id_; }

private:
    std::uint32_t machine_id_;
};

/// Raised when a worker session misses its deadline or drops before sending
/// its update. `machine_id` is empty when the peer never identified itself.
class Timeout : public Error {
public:
    Timeout(std::optional<std::uint32_t> machine_id, const std::string& what)
        : Error(what), machine_id_(machine_id) {}
    std::optional<std::uint32_t> machine_id() const noexcept { return machine_id_; }

private:
    std::optional<std::uint32_t> machine_id_;
};

} // namespace dice
