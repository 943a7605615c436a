#pragma once

#include <stdexcept>
#include <string>

namespace nlreg {

enum class ErrorKind {
  index,
  domain,
  precondition,
  resolution,
  modulus,
  size,
  parse,
  schema,
  invariant,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::index: return "index error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::modulus: return "modulus error";
    case ErrorKind::size: return "size error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::invariant: return "invariant error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, std::string location = {})
      : std::runtime_error(compose(kind, msg, location)),
        kind_(kind),
        detail_(msg),
        location_(std::move(location)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& location() const noexcept { return location_; }

  // Same error, re-anchored below a JSON-pointer prefix.
  Error at(const std::string& prefix) const {
    return Error(kind_, detail_, prefix + location_);
  }

 private:
  static std::string compose(ErrorKind k, const std::string& msg,
                             const std::string& loc) {
    std::string s = to_string(k);
    if (!loc.empty()) s += " at " + loc;
    return s + ": " + msg;
  }

  ErrorKind kind_;
  std::string detail_;
  std::string location_;
};

[[noreturn]] inline void raise(ErrorKind k, const std::string& msg,
                               std::string location = {}) {
  throw Error(k, msg, std::move(location));
}

}  // namespace nlreg
