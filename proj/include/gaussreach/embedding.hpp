#pragma once

#include <vector>

#include "gaussreach/sampler.hpp"

namespace gaussreach {

/// Unit-norm embedded point cloud with the per-point frame matrices
/// L_x = [f^k(x) | d_1 f^k(x) | ... | d_m f^k(x)] and pairwise Gram products.
/// Each point also carries an orthonormal basis of span(L_x), so projections
/// are rank-tolerant and never form the projector explicitly.
struct EmbeddedCloud {
  ManifoldGrid grid;
  int k = 0;

  Eigen::MatrixXd H;       // N x k, row i = f^k(x_i) / |f^k(x_i)|
  Eigen::VectorXd norms;   // |f^k(x_i)|
  std::vector<Eigen::MatrixXd> L;      // per point, k x (m+1)
  std::vector<Eigen::MatrixXd> basis;  // per point, k x rank, orthonormal
  std::vector<int> rank;               // numerical rank of L_x
  Eigen::MatrixXd gram;    // N x N inner products of H rows

  /// Builds a cloud from explicit unit rows and frames (synthetic instances).
  static EmbeddedCloud from_frames(const ManifoldGrid& grid, Eigen::MatrixXd H,
                                   std::vector<Eigen::MatrixXd> L);
};

EmbeddedCloud embed(const FieldBatch& batch, int threads = 0);

struct ProjectionResult {
  Eigen::VectorXd residual;       // v - P_x v
  double projected_norm_sq = 0.0; // |P_x v|^2
};

ProjectionResult project_residual(const EmbeddedCloud& cloud, Eigen::Index x_index,
                                  const Eigen::VectorXd& v);

/// Zero-centered sample correlation of the field values at two grid points.
double sample_correlation(const FieldBatch& batch, Eigen::Index x_index,
                          Eigen::Index y_index);

/// Orthonormal basis of a frame's column span with relative rank tolerance.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& frame, int* rank_out = nullptr);

}  // namespace gaussreach
