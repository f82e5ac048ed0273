#include "gaussreach/geometry.hpp"

#include <cmath>

namespace gaussreach {

double wrap_scalar(double d) {
  double w = std::fmod(d, kTwoPi);
  if (w > kPi) w -= kTwoPi;
  if (w <= -kPi) w += kTwoPi;
  return w;
}

Eigen::VectorXd wrap_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("wrap_distance: dimension mismatch");
  Eigen::VectorXd lag(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) lag[i] = wrap_scalar(x[i] - y[i]);
  return lag;
}

double ManifoldGrid::param_distance(Eigen::Index i, Eigen::Index j) const {
  return wrap_distance(point(i), point(j)).norm();
}

ManifoldGrid build_uniform_grid(int m, int n_per_dim) {
  if (m < 1 || m > 2)
    throw std::invalid_argument("build_uniform_grid: dimension must be 1 or 2");
  // The minimum is on the total point count; a 3x3 torus grid is fine while a
  // 3-point circle is too coarse for any pairwise computation.
  double total = std::pow(static_cast<double>(n_per_dim), m);
  if (n_per_dim < 2 || total < 4)
    throw std::invalid_argument("build_uniform_grid: n_per_dim too small");

  ManifoldGrid grid;
  grid.dim = m;
  grid.n_per_dim = n_per_dim;
  grid.spacing = kTwoPi / n_per_dim;

  Eigen::Index n = static_cast<Eigen::Index>(total);
  grid.points.resize(n, m);
  if (m == 1) {
    for (Eigen::Index i = 0; i < n; ++i) grid.points(i, 0) = i * grid.spacing;
  } else {
    Eigen::Index row = 0;
    for (int i = 0; i < n_per_dim; ++i)
      for (int j = 0; j < n_per_dim; ++j, ++row) {
        grid.points(row, 0) = i * grid.spacing;
        grid.points(row, 1) = j * grid.spacing;
      }
  }
  return grid;
}

}  // namespace gaussreach
