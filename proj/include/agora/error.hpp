#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace agora {

// Domain failure carrying a stable machine-readable name ("DuplicateVote",
// "SchemaViolation", ...) next to the human message.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

}  // namespace agora
