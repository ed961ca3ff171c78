#pragma once

#include <stdexcept>
#include <string>

namespace hometwin {

enum class ErrorCode {
    invalid_argument,
    no_data,
    not_found,
    out_of_range,
    config,
    source,        // transport or provider failure, retryable
    unauthorized,  // provider rejected the access token
    degenerate,
    insufficient_data,
    unavailable,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hometwin
