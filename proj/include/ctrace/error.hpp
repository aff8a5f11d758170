#pragma once

#include <stdexcept>
#include <string>

namespace ctrace {

// Every failure raised by the library carries a stable short name
// ("NoOnes", "ModulusMismatch", ...) that the CLI reports verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace ctrace
