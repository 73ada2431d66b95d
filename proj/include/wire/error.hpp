#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wire {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A write reached a block whose cells are already past endurance.
class DeadBlockError : public Error {
 public:
  explicit DeadBlockError(std::size_t block)
      : Error("write to dead block " + std::to_string(block)), block_(block) {}

  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class TraceError : public Error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wire
