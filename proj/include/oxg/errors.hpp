#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oxg {

/// Root of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution parameter lies outside its admissible domain.
class parameter_error : public error {
 public:
  using error::error;
};

/// An argument (probability, evaluation point, order) is outside the
/// domain of the requested operation.
class domain_error : public error {
 public:
  using error::error;
};

/// Baseline odds requested at or beyond the upper support bound.
class infinite_odds_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// The requested method is not available for this input.
class unsupported_error : public error {
 public:
  using error::error;
};

/// Observations are unusable for the requested model.
class data_error : public error {
 public:
  explicit data_error(const std::string& what, std::size_t index = npos)
      : error(what), index_(index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Offending observation, or npos when the problem is not tied to one.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class degenerate_data_error : public data_error {
 public:
  using data_error::data_error;
};

/// A numerical procedure failed to reach its tolerance.
class convergence_error : public error {
 public:
  using error::error;
};

}  // namespace oxg
