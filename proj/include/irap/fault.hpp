#pragma once

#include <functional>
#include <stdexcept>
#include <string_view>

namespace irap::fault {

/// Thrown by test hooks to abandon an operation midway, as a crash would.
class SimulatedCrash : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Hook = std::function<void(std::string_view point)>;

/// Installs a process-wide hook called at every named fault point; an empty
/// hook disables injection.
void set_hook(Hook hook);

/// Marks a fault point. Points: "intent-written", "target-committed",
/// "pi-committed", "propagated", "stats-written", "checkpoint-written".
void point(std::string_view name);

/// Hook that terminates the process without cleanup at the `nth` hit of
/// `name` (1-based); spec form "name" or "name:n".
Hook exit_at(std::string_view spec, int exit_code = 75);

}  // namespace irap::fault
