#pragma once

#include <stdexcept>
#include <string>

namespace hpclab {

/// A density left the admissible window [rho_bar/2, 2 rho_bar], or an
/// enthalpy value fell outside the image of that window.
class WindowViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solver run left the small-data regime (window exit or norm growth).
class BlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal numerical failure that should not happen for well-scaled input.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hpclab
