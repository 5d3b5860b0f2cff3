#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

// Base of all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration or an invalid parameter combination.
struct ConfigError : Error {
  using Error::Error;
};

// A numerical routine diverged or was handed an unusable problem.
struct NumericsError : Error {
  using Error::Error;
};

// Film height reached the positivity floor.
struct PositivityViolation : Error {
  PositivityViolation(int node_, double time_, double value_)
      : Error("film height reached the positivity floor at node " + std::to_string(node_) +
              ", t = " + std::to_string(time_)),
        node(node_),
        time(time_),
        value(value_) {}
  int node;
  double time;
  double value;
};

// Time stepping could not proceed even at the smallest admissible step.
struct UnrecoverableStep : Error {
  using Error::Error;
};

}  // namespace thinfilm
