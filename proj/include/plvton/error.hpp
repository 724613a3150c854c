#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plvton {

enum class ErrorCode {
  kDimension,
  kParameter,
  kEmptyRegion,
  kStructure,
  kValidation,
  kIo,
  kFormat,
  kInvariant,
};

std::string_view error_code_name(ErrorCode code);

/// Base exception for every failure the library reports. The code is the
/// machine-readable category the CLI forwards in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error(ErrorCode::kDimension, m) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& m) : Error(ErrorCode::kParameter, m) {}
};

class EmptyRegionError : public Error {
 public:
  explicit EmptyRegionError(const std::string& m) : Error(ErrorCode::kEmptyRegion, m) {}
};

class StructureError : public Error {
 public:
  explicit StructureError(const std::string& m) : Error(ErrorCode::kStructure, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCode::kValidation, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorCode::kFormat, m) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& m) : Error(ErrorCode::kInvariant, m) {}
};

}  // namespace plvton
