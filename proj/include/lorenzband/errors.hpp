#pragma once

#include <stdexcept>
#include <string>

namespace lorenzband {

enum class ErrorCode {
    missing_file,
    missing_column,
    non_numeric,
    negative_income,
    zero_total,
    too_few_rows,
    bad_argument,
    enumeration_cap,
    numerical,
};

const char* to_string(ErrorCode code);

/// Library error carrying a machine-checkable code plus a human message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lorenzband
