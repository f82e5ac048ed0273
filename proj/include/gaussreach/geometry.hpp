#pragma once

#include <Eigen/Core>

#include "gaussreach/common.hpp"

namespace gaussreach {

/// Uniform discretization of the unit circle (m=1) or flat torus (m=2).
/// Coordinates are angles in [0, 2*pi), lexicographically ordered, each an
/// exact multiple of the spacing 2*pi/n_per_dim.
struct ManifoldGrid {
  int dim = 1;
  int n_per_dim = 0;
  double spacing = 0.0;
  Eigen::MatrixXd points;  // N x dim

  Eigen::Index size() const { return points.rows(); }
  Eigen::VectorXd point(Eigen::Index i) const { return points.row(i).transpose(); }

  /// Euclidean length of the wrapped per-coordinate lag between grid points.
  double param_distance(Eigen::Index i, Eigen::Index j) const;
};

ManifoldGrid build_uniform_grid(int m, int n_per_dim);

/// Per-coordinate lag (x - y) reduced mod 2*pi into (-pi, pi]. The boundary
/// lag pi maps to pi for both argument orders.
Eigen::VectorXd wrap_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double wrap_scalar(double d);

}  // namespace gaussreach
