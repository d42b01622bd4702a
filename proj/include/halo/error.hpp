#pragma once

#include <stdexcept>
#include <string>

namespace halo {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument: non-finite state, out-of-range parameter, unknown name.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// The requested operation is not defined for the given parameters
// (e.g. the analytic steady state with k_apd or k_bpd different from 1).
class UnsupportedParameters : public Error {
public:
    using Error::Error;
};

// The integrator could not advance. Carries the time at which it gave up.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double failing_time)
        : Error(what), time_(failing_time) {}
    double failing_time() const noexcept { return time_; }

private:
    double time_;
};

// Malformed database or candidate file. line() is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace halo
