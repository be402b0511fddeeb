#pragma once

#include <stdexcept>
#include <string>

namespace siftmatch {

// Malformed descriptor file or report contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace siftmatch
