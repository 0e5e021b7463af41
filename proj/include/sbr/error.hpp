#pragma once

#include <stdexcept>
#include <string>

namespace sbr {

/// Argument outside the domain of a constitutive or geometric function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Schedule would overfill or empty the tank, or is malformed.
class ScheduleError : public std::runtime_error {
public:
    ScheduleError(const std::string& what, double time_s)
        : std::runtime_error(what), time_s_(time_s) {}
    double time_s() const noexcept { return time_s_; }

private:
    double time_s_;
};

/// Requested step exceeds the stability bound.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The explicit update left the invariant region. Never clipped.
class SchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ODE positivity could not be restored by step halving.
class KineticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario file problems. `field` is a JSON pointer into the document.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A stage failed during a scenario run.
class StageError : public std::runtime_error {
public:
    StageError(std::size_t stage_index, double time_s, const std::string& what)
        : std::runtime_error("stage " + std::to_string(stage_index) + " at t=" + std::to_string(time_s) +
                             " s: " + what),
          stage_index_(stage_index), time_s_(time_s) {}
    std::size_t stage_index() const noexcept { return stage_index_; }
    double time_s() const noexcept { return time_s_; }

private:
    std::size_t stage_index_;
    double time_s_;
};

}  // namespace sbr
