#include "vithsd/core/errors.hpp"

namespace vithsd {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::InvalidLevel: return "InvalidLevel";
        case ErrorCode::ConflictingTerm: return "ConflictingTerm";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidComment: return "InvalidComment";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::RaggedCounts: return "RaggedCounts";
        case ErrorCode::GateIndeterminate: return "GateIndeterminate";
        case ErrorCode::InvalidTransition: return "InvalidTransition";
        case ErrorCode::UnknownAnnotator: return "UnknownAnnotator";
        case ErrorCode::UnknownComment: return "UnknownComment";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::DivergenceError: return "DivergenceError";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::RemoteTimeout: return "RemoteTimeout";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::AlignmentError: return "AlignmentError";
        case ErrorCode::TopicExists: return "TopicExists";
        case ErrorCode::UnknownTopic: return "UnknownTopic";
        case ErrorCode::UnknownGroup: return "UnknownGroup";
        case ErrorCode::InvalidCommit: return "InvalidCommit";
        case ErrorCode::ClassifierFailure: return "ClassifierFailure";
        case ErrorCode::SinkFailure: return "SinkFailure";
        case ErrorCode::UnknownRound: return "UnknownRound";
        case ErrorCode::RoundExists: return "RoundExists";
        case ErrorCode::Unauthorized: return "Unauthorized";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vithsd
