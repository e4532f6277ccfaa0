#pragma once

#include <stdexcept>
#include <string>

namespace paramt {

// All recoverable failures (bad input files, violated preconditions,
// numerical blow-ups) surface as this type; the CLI maps it to a
// nonzero exit code with the message on stderr.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace paramt
