#pragma once

#include <stdexcept>
#include <string>

namespace sgnav {

// Malformed input file. `line` is 1-based, 0 when the failure is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// A scene yielded no complete observation/prediction windows. Distinct from a
// failure: callers that can proceed with an empty result simply do so, the CLI
// reports it as its own outcome.
class NoWindowsError : public std::runtime_error {
 public:
  explicit NoWindowsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training loss became non-finite.
class TrainDivergedError : public std::runtime_error {
 public:
  TrainDivergedError(int epoch, int batch)
      : std::runtime_error("training diverged (non-finite loss) at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batch)),
        epoch_(epoch),
        batch_(batch) {}
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_;
  int batch_;
};

}  // namespace sgnav
