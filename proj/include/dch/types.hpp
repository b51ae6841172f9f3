#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dch {

using Complex = std::complex<double>;
using VertexId = std::uint32_t;
using QuadId = std::uint32_t;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

// Bad input: malformed files, violated preconditions, unknown ids.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: tolerance breach, pole proximity, singular systems.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  explicit NumericalError(const std::string& what)
      : NumericalError(what, 0.0) {}

  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

}  // namespace dch
