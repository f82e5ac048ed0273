#include "gaussreach/reach.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gaussreach/parallel.hpp"
#include "gaussreach/rng.hpp"

namespace gaussreach {

namespace {

double default_exclusion(const ManifoldGrid& grid, double requested) {
  return requested > 0.0 ? requested : 2.0 * grid.spacing;
}

struct SweepResult {
  double cot2 = -1.0;
  Eigen::Index argmax = -1;
  bool on_boundary = false;
};

// Residual-norm ratio sweep for one base point. The residual matrix is formed
// explicitly (rows h(y) - P_x h(y)) so that points lying in span(L_x) give
// exact zeros instead of cancellation noise.
SweepResult sweep_point(const EmbeddedCloud& cloud, Eigen::Index x, double exclusion) {
  const Eigen::MatrixXd& q = cloud.basis.at(static_cast<std::size_t>(x));
  Eigen::MatrixXd s;
  s.noalias() = cloud.H * q;
  Eigen::MatrixXd res = cloud.H;
  res.noalias() -= s * q.transpose();
  Eigen::VectorXd num = res.rowwise().squaredNorm();

  SweepResult out;
  Eigen::Index n = cloud.H.rows();
  for (Eigen::Index y = 0; y < n; ++y) {
    if (y == x) continue;
    if (cloud.grid.param_distance(x, y) <= exclusion) continue;
    double dg = 1.0 - cloud.gram(x, y);
    if (dg == 0.0)
      throw NumericalError("reach: unit sample correlation at distinct points");
    double ratio = num[y] / (dg * dg);
    if (ratio > out.cot2) {
      out.cot2 = ratio;
      out.argmax = y;
    }
  }
  if (out.argmax < 0)
    throw std::invalid_argument("reach: no admissible candidates (exclusion too large)");
  out.on_boundary =
      cloud.grid.param_distance(x, out.argmax) <= exclusion + cloud.grid.spacing;
  return out;
}

double ratio_at_offgrid(const FieldBatch& batch, const EmbeddedCloud& cloud,
                        Eigen::Index x, const Eigen::VectorXd& y_point) {
  Eigen::MatrixXd pts(1, y_point.size());
  pts.row(0) = y_point.transpose();
  Eigen::VectorXd f = batch.eval_values(pts).col(0);
  double norm = f.norm();
  if (!(norm > 0.0)) throw NumericalError("reach: zero norm at refined point");
  Eigen::VectorXd h = f / norm;
  const Eigen::MatrixXd& q = cloud.basis.at(static_cast<std::size_t>(x));
  Eigen::VectorXd coeffs = q.transpose() * h;
  double num = (h - q * coeffs).squaredNorm();
  double dg = 1.0 - cloud.H.row(x).dot(h);
  if (dg == 0.0) throw NumericalError("reach: unit correlation at refined point");
  return num / (dg * dg);
}

// Golden-section maximization over [a, b] for a smooth unimodal bracket.
template <typename Fn>
double golden_max(Fn&& fn, double a, double b, int iterations = 48) {
  const double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

std::pair<double, Eigen::Index> local_reach_geometric(const EmbeddedCloud& cloud,
                                                      Eigen::Index x_index,
                                                      double diag_exclusion) {
  double excl = default_exclusion(cloud.grid, diag_exclusion);
  if (excl < cloud.grid.spacing)
    throw std::invalid_argument("local_reach_geometric: exclusion below grid spacing");
  SweepResult r = sweep_point(cloud, x_index, excl);
  return {r.cot2, r.argmax};
}

ReachReport global_reach(const EmbeddedCloud& cloud, double diag_exclusion,
                         int threads) {
  Eigen::Index n = cloud.H.rows();
  if (n < 2) throw std::invalid_argument("global_reach: need at least two points");
  double excl = default_exclusion(cloud.grid, diag_exclusion);

  ReachReport report;
  report.diag_exclusion = excl;
  report.local_cot2.resize(n);
  report.argmax_index.resize(n);
  report.argmax_on_boundary.assign(static_cast<std::size_t>(n), 0);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t xi) {
    SweepResult r = sweep_point(cloud, static_cast<Eigen::Index>(xi), excl);
    report.local_cot2[static_cast<Eigen::Index>(xi)] = r.cot2;
    report.argmax_index[static_cast<Eigen::Index>(xi)] = static_cast<int>(r.argmax);
    report.argmax_on_boundary[xi] = r.on_boundary ? 1 : 0;
  });

  report.global_cot2 = -1.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    if (report.local_cot2[x] > report.global_cot2) {
      report.global_cot2 = report.local_cot2[x];
      report.global_x = x;
    }
  }
  report.theta_k = std::atan2(1.0, std::sqrt(std::max(report.global_cot2, 0.0)));
  return report;
}

Eigen::VectorXd conditional_residual_vector(const FieldBatch& batch,
                                            const TrigKernel& kernel,
                                            Eigen::Index x_index,
                                            Eigen::Index y_index) {
  if (x_index == y_index)
    throw std::invalid_argument(
        "conditional_residual: coincident points, use diagonal_residual_limit");
  if (!batch.has_d1())
    throw std::invalid_argument("conditional_residual: batch lacks derivatives");
  Eigen::VectorXd x = batch.grid.point(x_index);
  Eigen::VectorXd y = batch.grid.point(y_index);
  double c = kernel_eval(kernel, x, y);
  double om = kernel_one_minus(kernel, x, y);
  if (!(om > 0.0))
    throw std::invalid_argument("conditional_residual: pair has unit correlation");

  KernelDerivs kd(kernel, x, y, 1);
  Eigen::VectorXd w = batch.values.col(y_index) - c * batch.values.col(x_index);
  for (int d = 0; d < batch.grid.dim; ++d) {
    double xc_over_lambda = kd.dx(d) / kernel.lambda(d);  // (X_d C) X_d f uses 1/lambda
    w.noalias() -= xc_over_lambda * batch.d1[static_cast<std::size_t>(d)].col(x_index);
  }
  return w / om;
}

double conditional_residual(const FieldBatch& batch, const TrigKernel& kernel,
                            Eigen::Index x_index, Eigen::Index y_index,
                            Eigen::Index replicate) {
  return conditional_residual_vector(batch, kernel, x_index, y_index)[replicate];
}

double diagonal_residual_limit(const FieldBatch& batch, const TrigKernel& kernel,
                               Eigen::Index x_index, const Eigen::VectorXd& direction,
                               Eigen::Index replicate) {
  if (!batch.has_d2())
    throw std::invalid_argument("diagonal_residual_limit: batch lacks second derivatives");
  int m = batch.grid.dim;
  if (direction.size() != m)
    throw std::invalid_argument("diagonal_residual_limit: direction dimension mismatch");

  // Normalize the direction in the induced metric; the Hessian of the
  // covariance in that direction is then exactly -1.
  double gnorm2 = 0.0;
  for (int d = 0; d < m; ++d)
    gnorm2 += kernel.lambda(d) * direction[d] * direction[d];
  if (!(gnorm2 > 0.0))
    throw std::invalid_argument("diagonal_residual_limit: zero direction");
  Eigen::VectorXd c = direction / std::sqrt(gnorm2);

  double hess = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double factor = (i == j) ? c[i] * c[i] : 2.0 * c[i] * c[j];
      hess += factor *
              batch.d2[static_cast<std::size_t>(d2_index(i, j, m))](replicate, x_index);
    }
  return batch.values(replicate, x_index) + hess;
}

PairDecomposition reach_decomposition(const FieldBatch& batch, const TrigKernel& kernel,
                                      const EmbeddedCloud& cloud, Eigen::Index x_index,
                                      Eigen::Index y_index) {
  if (x_index == y_index)
    throw std::invalid_argument("reach_decomposition: coincident points");
  double chat = cloud.gram(x_index, y_index);
  if (chat == 1.0)
    throw NumericalError("reach_decomposition: unit sample correlation at distinct points");

  double k = static_cast<double>(cloud.k);
  PairDecomposition out;
  out.term1 = k / (cloud.norms[y_index] * cloud.norms[y_index]);
  double om = kernel_one_minus(kernel, batch.grid.point(x_index), batch.grid.point(y_index));
  double ratio = om / (1.0 - chat);
  out.term2 = ratio * ratio;

  Eigen::VectorXd residual = conditional_residual_vector(batch, kernel, x_index, y_index);
  out.term3 = residual.squaredNorm() / k;
  const Eigen::MatrixXd& q = cloud.basis.at(static_cast<std::size_t>(x_index));
  double projected = (q.transpose() * residual).squaredNorm();
  out.error_term = out.term1 * out.term2 * projected / k;
  out.combined = out.term1 * out.term2 * out.term3 - out.error_term;
  return out;
}

ReachReport reach_report(const FieldBatch& batch, const TrigKernel& kernel,
                         const EmbeddedCloud& cloud, const ReachSettings& settings) {
  ReachReport report = global_reach(cloud, settings.diag_exclusion, settings.threads);

  Eigen::Index n = cloud.H.rows();
  report.decomposition.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), settings.threads, [&](std::size_t xi) {
    Eigen::Index x = static_cast<Eigen::Index>(xi);
    report.decomposition[xi] =
        reach_decomposition(batch, kernel, cloud, x, report.argmax_index[x]);
  });

  if (settings.refine && cloud.grid.dim == 1) {
    // Polish the discrete sup along the parameter; the grid sup undershoots
    // by O(spacing^2).
    parallel_for(static_cast<std::size_t>(n), settings.threads, [&](std::size_t xi) {
      Eigen::Index x = static_cast<Eigen::Index>(xi);
      double y0 = cloud.grid.points(report.argmax_index[x], 0);
      double h = cloud.grid.spacing;
      auto fn = [&](double ang) {
        Eigen::VectorXd pt(1);
        pt[0] = ang;
        return ratio_at_offgrid(batch, cloud, x, pt);
      };
      double refined = golden_max(fn, y0 - h, y0 + h);
      if (refined > report.local_cot2[x]) report.local_cot2[x] = refined;
    });
    report.global_cot2 = -1.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      if (report.local_cot2[x] > report.global_cot2) {
        report.global_cot2 = report.local_cot2[x];
        report.global_x = x;
      }
    }
    report.theta_k = std::atan2(1.0, std::sqrt(std::max(report.global_cot2, 0.0)));
  }
  return report;
}

double brute_force_reach_oracle(const EmbeddedCloud& cloud, Eigen::Index x_index,
                                int n_directions, double r_step,
                                std::uint64_t direction_seed, double exclusion) {
  Eigen::Index n = cloud.H.rows();
  if (n > 64 || cloud.k > 16)
    throw std::invalid_argument("brute_force_reach_oracle: instance too large");
  if (n_directions < 32)
    throw std::invalid_argument("brute_force_reach_oracle: need at least 32 directions");
  if (!(r_step > 0.0))
    throw std::invalid_argument("brute_force_reach_oracle: r_step must be positive");

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index y = 0; y < n; ++y) {
    if (y == x_index) continue;
    if (cloud.grid.param_distance(x_index, y) <= exclusion) continue;
    candidates.push_back(y);
  }
  if (candidates.empty())
    throw std::invalid_argument("brute_force_reach_oracle: no candidates");

  Eigen::VectorXd gx(candidates.size());
  Eigen::MatrixXd hy(static_cast<Eigen::Index>(candidates.size()), cloud.k);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    gx[static_cast<Eigen::Index>(i)] = cloud.gram(x_index, candidates[i]);
    hy.row(static_cast<Eigen::Index>(i)) = cloud.H.row(candidates[i]);
  }

  double best = kPi / 2.0;
  int steps = static_cast<int>(std::ceil((kPi / 2.0) / r_step));
  for (int dir = 0; dir < n_directions; ++dir) {
    // Unit normal: Gaussian vector with the frame span projected out.
    CounterRng rng(direction_seed, static_cast<std::uint64_t>(dir));
    Eigen::VectorXd g(cloud.k);
    Eigen::VectorXd eta;
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int i = 0; i < cloud.k; ++i) g[i] = rng.normal();
      ProjectionResult pr = project_residual(cloud, x_index, g);
      double norm = pr.residual.norm();
      if (norm > 1e-8 * g.norm()) {
        eta = pr.residual / norm;
        break;
      }
    }
    if (eta.size() == 0)
      throw NumericalError("brute_force_reach_oracle: empty normal space");

    Eigen::VectorXd t = hy * eta;
    double theta_dir = kPi / 2.0;
    for (int s = 1; s <= steps; ++s) {
      double r = std::min(s * r_step, kPi / 2.0);
      double cr = std::cos(r), sr = std::sin(r);
      // Some candidate at least as close to the geodesic point as x itself.
      double margin = (cr * (gx.array() - 1.0) + sr * t.array()).maxCoeff();
      if (margin >= 0.0) {
        theta_dir = r;
        break;
      }
    }
    best = std::min(best, theta_dir);
  }
  return best;
}

}  // namespace gaussreach
