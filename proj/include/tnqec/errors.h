#pragma once

#include <stdexcept>
#include <string>

namespace tnqec {

/// Operands disagree on qubit count, or a qubit index is out of range.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Unknown seed-code name.
struct catalog_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Stabilizer generators that do not commute or are not independent.
struct invalid_stabilizer_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A caller violated an operation's precondition (dead qubit, disallowed action, ...).
struct precondition_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// Malformed code, network, table or config text.
struct parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Distance requested for a code with no logical qubits.
struct undefined_distance_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Enumeration would exceed the configured budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No best-known-distance entry for the requested (n, k).
struct table_miss_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Invalid experiment configuration.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace tnqec
