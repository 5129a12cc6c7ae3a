#ifndef VMSIM_ERRORS_HPP
#define VMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vmsim {

/// Error codes surfaced by the simulator. ReservationViolation signals a
/// logic bug and aborts the run; everything else is recoverable.
enum class Err {
    ArithmeticOverflow,
    DuplicateRequest,
    InvalidDeallocation,
    NoFeasibleTarget,
    ReservationInfeasible,
    MigrationInfeasible,
    InvalidPlan,
    ReservationViolation,
    InsufficientHistory,
    TimeTravel,
    MalformedLog,
    ScenarioMismatch,
    SchemaError,
    InvalidPlacement,
    UnknownPolicy,
    UnknownFormat,
};

const char* err_name(Err code);

class SimError : public std::runtime_error {
public:
    SimError(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

} // namespace vmsim

#endif
