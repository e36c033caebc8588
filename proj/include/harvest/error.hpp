#pragma once

#include <stdexcept>
#include <string>

namespace harvest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, histogram or geometry input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance file or cart log. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// An exact solver was asked for more requests than its cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure of the simulator (illegal FSM edge, step ceiling).
class SimulationFault : public Error {
 public:
  using Error::Error;
};

class FieldExhausted : public Error {
 public:
  FieldExhausted() : Error("no unharvested furrow remains") {}
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace harvest
