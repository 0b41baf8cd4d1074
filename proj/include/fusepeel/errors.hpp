#ifndef FUSEPEEL_ERRORS_HPP
#define FUSEPEEL_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fusepeel {

// Requested object would not fit the index or memory budget.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Retrieval construction failed for every retry seed.
class BuildFailedError : public std::runtime_error {
 public:
  BuildFailedError(const std::string& what, std::uint32_t attempts)
      : std::runtime_error(what), attempts(attempts) {}
  std::uint32_t attempts;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Rejected serialized payload; `code` tells the caller which check failed.
class SerializeError : public std::runtime_error {
 public:
  enum class Code {
    magic_mismatch,
    unsupported_version,
    truncated,
    checksum_mismatch,
    invalid_field,
  };

  SerializeError(Code code, const std::string& what)
      : std::runtime_error(what), code(code) {}
  Code code;
};

}  // namespace fusepeel

#endif  // FUSEPEEL_ERRORS_HPP
