#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace msqkd {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  IsometryViolation,
  MissingCells,
  InfeasibleStats,
  Io,
  Parse,
};

// Single exception type for the core library; the C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MissingCellsError : public Error {
 public:
  explicit MissingCellsError(std::vector<std::string> cells);

  const std::vector<std::string>& cells() const noexcept { return cells_; }

 private:
  std::vector<std::string> cells_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace msqkd
