#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrbp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape disagreement between operands (non-square input, channel mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid values inside an otherwise well-shaped operand (NaN/Inf entries).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar argument or empty collection where one is required.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// File container violations: bad magic, unsupported version, wrong record type.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Truncated or inconsistent file body; carries the byte offset of the failure.
class CorruptionError : public Error {
 public:
  CorruptionError(const std::string& what, std::uint64_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
  std::uint64_t byte_offset;
};

/// Text input that does not parse; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

}  // namespace lrbp
