#include "irap/fault.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

namespace irap::fault {

namespace {

std::mutex& hook_mutex() {
  static std::mutex m;
  return m;
}

Hook& current() {
  static Hook h;
  return h;
}

}  // namespace

void set_hook(Hook hook) {
  std::lock_guard lock(hook_mutex());
  current() = std::move(hook);
}

void point(std::string_view name) {
  Hook h;
  {
    std::lock_guard lock(hook_mutex());
    h = current();
  }
  if (h) h(name);
}

Hook exit_at(std::string_view spec, int exit_code) {
  std::string name(spec);
  int nth = 1;
  if (auto colon = name.find(':'); colon != std::string::npos) {
    nth = std::atoi(name.c_str() + colon + 1);
    name.resize(colon);
  }
  auto hits = std::make_shared<int>(0);
  return [name, nth, hits, exit_code](std::string_view p) {
    if (p == name && ++*hits == nth) std::_Exit(exit_code);
  };
}

}  // namespace irap::fault
