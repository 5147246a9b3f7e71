#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace isg {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// A caller broke a documented precondition.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// An oracle or enumerator was asked to run past its size cap.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The input does not satisfy the structural assumption (P_t-free, C_{>t}-free)
// that a structural argument relies on. When cheap, `certificate` lists the offending
// vertices (an induced path or cycle, or a component pair).
struct StructuralViolation : std::runtime_error {
    std::vector<int> certificate;
    StructuralViolation(const std::string& msg, std::vector<int> cert = {})
        : std::runtime_error(msg), certificate(std::move(cert)) {}
};

// A hand-written automaton is incomplete or malformed.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by in-run assertions enabled with validation mode.
struct InvariantFailure : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace isg
