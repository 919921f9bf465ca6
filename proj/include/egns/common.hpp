#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace egns {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Pointwise vector field, e.g. a body force or boundary datum.
using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;
using TensorField = std::function<Mat2(const Vec2&)>;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh input. `line()` is the 1-based source line, or 0 when the
/// mesh did not come from a file.
class MeshError : public Error {
 public:
  MeshError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Element whose area is too small relative to its diameter.
class SingularElementError : public Error {
 public:
  using Error::Error;
};

class OutOfElementError : public Error {
 public:
  using Error::Error;
};

/// Rejected user input (bad config key, invalid parameter, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Linear algebra failure (singular factorization).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// 2D scalar cross product a x b = a1 b2 - a2 b1.
inline double cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counterclockwise rotation by 90 degrees.
inline Vec2 rotate_ccw(const Vec2& a) { return {-a.y(), a.x()}; }

}  // namespace egns
