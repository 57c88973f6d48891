#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ripple {

enum class ErrorCode {
    InvalidParams,
    DegenerateInput,
    NearDegeneracy,
    DegenerateStart,
    ZeroVelocity,
    GapClosure,
    InsufficientPoints,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::NearDegeneracy: return "NearDegeneracy";
        case ErrorCode::DegenerateStart: return "DegenerateStart";
        case ErrorCode::ZeroVelocity: return "ZeroVelocity";
        case ErrorCode::GapClosure: return "GapClosure";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

// Every failure in the library is reported through this type; the code is
// what callers (the sweep engine in particular) switch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ripple
