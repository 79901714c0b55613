#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcagent {

// Every failure the library reports is an Error carrying one of these codes.
enum class ErrorCode {
  // agent registry
  InvalidName,
  InvalidPersona,
  UnknownVoiceStyle,
  UnknownAgent,
  // dialogue manager
  UnknownGroup,
  UnknownSender,
  InvalidBody,
  UnknownReplyTarget,
  UnknownMessage,
  InvalidParticipant,
  CorruptLog,
  // llm engine
  Timeout,
  TransportError,
  RemoteError,
  MissingCredential,
  // validator
  ExhaustedRetries,
  // plugins
  UnsupportedPlugin,
  AdapterFailure,
  MalformedBlob,
  // server
  SequenceViolation,
  StorageFailure,
  BindFailure,
  // eval
  JudgeTransportError,
  UnparseableJudgeOutput,
  NoMarker,
  OutOfRange,
  EmptyInput,
  // analytics
  ZeroBaseline,
  EmptyCohort,
  // shared
  InvalidConfig,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail, int status = 0);

  ErrorCode code() const noexcept { return code_; }
  // HTTP status for RemoteError, 0 otherwise.
  int status() const noexcept { return status_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  int status_;
  std::string detail_;
};

}  // namespace gcagent
