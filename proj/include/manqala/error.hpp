#pragma once

#include <stdexcept>
#include <string>

namespace manqala {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem size exceeds a configured limit.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Occupation vector is not a member of the basis.
class NotMemberError : public Error {
 public:
  using Error::Error;
};

/// Site index outside [0, M) or length mismatch.
class SiteRangeError : public Error {
 public:
  using Error::Error;
};

/// A projector keeps no basis state.
class EmptyRangeError : public Error {
 public:
  using Error::Error;
};

/// State has weight outside a Zeno-locked subspace.
class LeakageError : public Error {
 public:
  using Error::Error;
};

/// Bad argument shape or value (length mismatch, non-positive horizon, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Board cannot be cleared under Tchoukaillon sowing rules.
class UnwinnableBoardError : public Error {
 public:
  using Error::Error;
};

/// A controller asked for a designated time the plan does not contain.
class PlanLookupError : public Error {
 public:
  using Error::Error;
};

/// Scenario file failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace manqala
