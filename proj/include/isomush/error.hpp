#pragma once

#include <stdexcept>
#include <string>

namespace isomush {

// Failure classes map onto the CLI exit codes (1 usage, 2 I/O, 3 numerical).
enum class ErrorKind { kUsage = 1, kIo = 2, kNumerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return Error(ErrorKind::kUsage, what); }
inline Error io_error(const std::string& what) { return Error(ErrorKind::kIo, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::kNumerical, what); }

}  // namespace isomush
