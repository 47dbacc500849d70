#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace soliton_squeeze {

/// Invalid user-facing input: out-of-range parameters, malformed documents,
/// unrealizable interferometer settings.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation left its accuracy envelope (energy drift, symplectic
/// defect) or was asked for an undefined quantity.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(std::string_view)>;

// Non-fatal diagnostics go through a process-wide handler (stderr by
// default). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace soliton_squeeze
