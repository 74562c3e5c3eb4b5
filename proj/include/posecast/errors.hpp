#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace posecast {

// Precondition or shape violation on a public API.
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed byte stream or text payload. `offset` is the byte position of
// the first invalid content, when known.
class format_error : public std::runtime_error {
 public:
  format_error(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit format_error(const std::string& what)
      : std::runtime_error(what), offset_(0) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Rank-deficient point configuration handed to an alignment solver.
class degeneracy_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss encountered while training. Carries the failing step.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& what, std::size_t step)
      : std::runtime_error(what + " at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Invalid user-supplied configuration (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace posecast
