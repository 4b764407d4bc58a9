#pragma once

#include <stdexcept>
#include <string>

namespace guided {

enum class ErrorCode {
  MalformedDocument,
  DuplicateVertexId,
  DanglingEdgeEndpoint,
  NonPositiveQ,
  BadDimensions,
  MalformedInterval,
  ConvergenceFailure,
  SupportOutsideWindow,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

/// Error with a stable code plus an optional document path ("/edges/3/index")
/// pointing at the offending input location.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = "")
      : std::runtime_error(path.empty() ? std::string(error_code_name(code)) + ": " + message
                                        : std::string(error_code_name(code)) + " at " + path +
                                              ": " + message),
        code_(code),
        path_(std::move(path)) {}

  ErrorCode code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace guided
