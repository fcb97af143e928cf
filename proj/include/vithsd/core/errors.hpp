#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vithsd {

enum class ErrorCode {
    UnknownTarget,
    InvalidLevel,
    ConflictingTerm,
    ParseError,
    SchemaError,
    IoError,
    InvalidComment,
    EmptyInput,
    LengthMismatch,
    RaggedCounts,
    GateIndeterminate,
    InvalidTransition,
    UnknownAnnotator,
    UnknownComment,
    DimensionError,
    DivergenceError,
    InvalidConfig,
    RemoteTimeout,
    ProtocolError,
    AlignmentError,
    TopicExists,
    UnknownTopic,
    UnknownGroup,
    InvalidCommit,
    ClassifierFailure,
    SinkFailure,
    UnknownRound,
    RoundExists,
    Unauthorized,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace vithsd
