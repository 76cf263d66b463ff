#pragma once

#include <stdexcept>
#include <string>

namespace minksurf {

/// Coarse failure categories; the CLI maps these to exit codes.
enum class ErrorKind {
    Input,       // bad arguments, malformed files, violated preconditions
    Resource,    // guarded limits exceeded (grid level, etc.)
    Resolution,  // grid too coarse for the requested construction
    Infeasible,  // no solution exists for the given data
    Degenerate,  // geometric degeneracy (coplanar duals, empty body)
    Solver,      // iteration failed to converge
    Evaluation   // non-finite value from a user-supplied field
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace minksurf
