#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Every library failure is reported through this type; `kind` lets the CLI
// map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { Domain, NonConvergence, Budget, Singularity, MissingData };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(Error::Kind::Domain, what);
}

[[noreturn]] inline void throw_nonconvergence(const std::string& what) {
  throw Error(Error::Kind::NonConvergence, what);
}

}  // namespace casimir
