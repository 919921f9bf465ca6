#pragma once

#include "egns/common.hpp"

#include <vector>

namespace egns {

/// Symmetric rule on a triangle in barycentric coordinates. Weights sum to
/// one; multiply by the element area at use.
struct QuadratureRule {
  int degree = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for all polynomials of total degree <= `degree` (1..10).
/// Throws ConfigError for unsupported degrees.
const QuadratureRule& quadrature_rule(int degree);

inline constexpr int kMaxQuadratureDegree = 10;

/// Gauss-Legendre rule on [0, 1] with `n` points (1..10); weights sum to one.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const LineRule& gauss_line(int n);

}  // namespace egns
