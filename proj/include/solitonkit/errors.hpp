#pragma once

#include <stdexcept>
#include <string>

namespace solitonkit {

/// An input violates an operation's precondition (wrong model, bad field, not a soliton...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical dimension claim could not be certified by a spectral gap.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency failure, e.g. a weight multiset that is not a genuine module.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectrum table is too short to decide a membership question.
class InsufficientSpectrumError : public PreconditionError {
 public:
  InsufficientSpectrumError(const std::string& what, int required_kmax)
      : PreconditionError(what), required_kmax_(required_kmax) {}
  int required_kmax() const noexcept { return required_kmax_; }

 private:
  int required_kmax_;
};

}  // namespace solitonkit
