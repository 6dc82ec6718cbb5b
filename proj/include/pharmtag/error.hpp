#pragma once

#include <stdexcept>
#include <string>

namespace pharmtag {

// Recoverable failures (I/O, malformed input, contract violations on user
// data) are thrown as pharmtag::error so callers can tell them apart from
// programming errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pharmtag
