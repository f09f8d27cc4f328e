#pragma once

#include <stdexcept>
#include <string>

namespace cloudq {

enum class ErrorKind {
    config,
    resource_limit,
    empty_table,
    label,
    infeasible_transition,
    step_size,
    branch_cap,
    range,
    division_by_zero,
    overflow,
    degree_too_low,
    domain,
    unknown_primitive,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit status used by the CLI for each error family.
int exit_code(ErrorKind kind) noexcept;

}  // namespace cloudq
