#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slr {

struct Span {
  int line = 0;
  int col = 0;
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

// One reported problem. `rule` names the typing rule, presupposition or
// parser stage that failed.
struct Diagnostic {
  Span span;
  std::string rule;
  std::string message;
  std::string constraint;  // failing c <= d, empty when not applicable
};

std::string to_string(const Diagnostic& d);

// Thrown for programming errors at API boundaries (unbound variables,
// stale redexes, mismatched interfaces).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct Result {
  std::optional<T> value;
  std::vector<Diagnostic> errors;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

}  // namespace slr
