#include "gcagent/common/error.hpp"

namespace gcagent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::InvalidPersona: return "InvalidPersona";
    case ErrorCode::UnknownVoiceStyle: return "UnknownVoiceStyle";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::UnknownSender: return "UnknownSender";
    case ErrorCode::InvalidBody: return "InvalidBody";
    case ErrorCode::UnknownReplyTarget: return "UnknownReplyTarget";
    case ErrorCode::UnknownMessage: return "UnknownMessage";
    case ErrorCode::InvalidParticipant: return "InvalidParticipant";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::RemoteError: return "RemoteError";
    case ErrorCode::MissingCredential: return "MissingCredential";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::UnsupportedPlugin: return "UnsupportedPlugin";
    case ErrorCode::AdapterFailure: return "AdapterFailure";
    case ErrorCode::MalformedBlob: return "MalformedBlob";
    case ErrorCode::SequenceViolation: return "SequenceViolation";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::JudgeTransportError: return "JudgeTransportError";
    case ErrorCode::UnparseableJudgeOutput: return "UnparseableJudgeOutput";
    case ErrorCode::NoMarker: return "NoMarker";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail, int status)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      status_(status),
      detail_(detail) {}

}  // namespace gcagent
