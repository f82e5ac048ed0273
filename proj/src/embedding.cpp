#include "gaussreach/embedding.hpp"

#include <Eigen/Dense>

#include "gaussreach/parallel.hpp"

namespace gaussreach {

namespace {
constexpr double kRankTol = 1e-10;
}

Eigen::MatrixXd span_basis(const Eigen::MatrixXd& frame, int* rank_out) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  double cutoff = sv.size() > 0 ? kRankTol * sv[0] : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  if (rank_out) *rank_out = rank;
  return svd.matrixU().leftCols(rank);
}

EmbeddedCloud embed(const FieldBatch& batch, int threads) {
  if (!batch.has_d1())
    throw std::invalid_argument("embed: batch lacks first derivatives");
  int m = batch.grid.dim;
  if (batch.k < m + 1)
    throw std::invalid_argument("embed: need k >= m + 1 replicates");

  Eigen::Index n = batch.grid.size();
  EmbeddedCloud cloud;
  cloud.grid = batch.grid;
  cloud.k = batch.k;
  cloud.norms.resize(n);
  cloud.H.resize(n, batch.k);
  cloud.L.resize(static_cast<std::size_t>(n));
  cloud.basis.resize(static_cast<std::size_t>(n));
  cloud.rank.assign(static_cast<std::size_t>(n), 0);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t xi) {
    Eigen::Index x = static_cast<Eigen::Index>(xi);
    double norm = batch.values.col(x).norm();
    if (!(norm > 0.0))
      throw NumericalError("embed: zero field norm at grid point " + std::to_string(x));
    cloud.norms[x] = norm;
    cloud.H.row(x) = batch.values.col(x).transpose() / norm;

    Eigen::MatrixXd frame(batch.k, m + 1);
    frame.col(0) = batch.values.col(x);
    for (int d = 0; d < m; ++d)
      frame.col(1 + d) = batch.d1[static_cast<std::size_t>(d)].col(x);
    cloud.L[xi] = frame;
    cloud.basis[xi] = span_basis(frame, &cloud.rank[xi]);
  });

  cloud.gram.noalias() = cloud.H * cloud.H.transpose();
  return cloud;
}

EmbeddedCloud EmbeddedCloud::from_frames(const ManifoldGrid& grid, Eigen::MatrixXd H,
                                         std::vector<Eigen::MatrixXd> L) {
  if (H.rows() != grid.size() || L.size() != static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument("EmbeddedCloud: row/frame count mismatch with grid");
  EmbeddedCloud cloud;
  cloud.grid = grid;
  cloud.k = static_cast<int>(H.cols());
  cloud.H = std::move(H);
  cloud.L = std::move(L);
  cloud.norms = Eigen::VectorXd::Ones(cloud.H.rows());
  cloud.basis.resize(cloud.L.size());
  cloud.rank.assign(cloud.L.size(), 0);
  for (std::size_t i = 0; i < cloud.L.size(); ++i) {
    double rnorm = cloud.H.row(static_cast<Eigen::Index>(i)).norm();
    if (std::abs(rnorm - 1.0) > 1e-9)
      throw std::invalid_argument("EmbeddedCloud: rows must be unit norm");
    cloud.basis[i] = span_basis(cloud.L[i], &cloud.rank[i]);
  }
  cloud.gram.noalias() = cloud.H * cloud.H.transpose();
  return cloud;
}

ProjectionResult project_residual(const EmbeddedCloud& cloud, Eigen::Index x_index,
                                  const Eigen::VectorXd& v) {
  if (v.size() != cloud.k)
    throw std::invalid_argument("project_residual: vector length must equal k");
  const Eigen::MatrixXd& q = cloud.basis.at(static_cast<std::size_t>(x_index));
  Eigen::VectorXd coeffs = q.transpose() * v;
  ProjectionResult out;
  out.residual = v - q * coeffs;
  out.projected_norm_sq = coeffs.squaredNorm();
  return out;
}

double sample_correlation(const FieldBatch& batch, Eigen::Index x_index,
                          Eigen::Index y_index) {
  const auto& values = batch.values;
  if (x_index < 0 || x_index >= values.cols() || y_index < 0 ||
      y_index >= values.cols())
    throw std::invalid_argument("sample_correlation: index out of range");
  double xx = values.col(x_index).squaredNorm();
  double yy = values.col(y_index).squaredNorm();
  if (!(xx > 0.0) || !(yy > 0.0))
    throw NumericalError("sample_correlation: zero norm sample");
  double xy = values.col(x_index).dot(values.col(y_index));
  return xy / std::sqrt(xx * yy);
}

}  // namespace gaussreach
