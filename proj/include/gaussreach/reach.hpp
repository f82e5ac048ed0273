#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gaussreach/embedding.hpp"

namespace gaussreach {

struct PairDecomposition {
  double term1 = 0;      // k / |f^k(y)|^2
  double term2 = 0;      // (1 - C)^2 / (1 - Chat_k)^2
  double term3 = 0;      // |f^{x,k}(y)|^2 / k
  double error_term = 0; // term1 * term2 * |P_x f^{x,k}(y)|^2 / k
  double combined = 0;   // term1 * term2 * term3 - error_term
};

struct ReachReport {
  Eigen::VectorXd local_cot2;
  Eigen::VectorXi argmax_index;
  std::vector<std::uint8_t> argmax_on_boundary;  // argmax in the first admissible ring
  double global_cot2 = 0.0;
  double theta_k = 0.0;  // arccot(sqrt(global_cot2)), in (0, pi/2]
  Eigen::Index global_x = 0;
  double diag_exclusion = 0.0;
  std::vector<PairDecomposition> decomposition;  // per x at its argmax pair
};

struct ReachSettings {
  double diag_exclusion = 0.0;  // <= 0 selects the default 2 * grid spacing
  bool refine = false;          // golden-section polish of the sup (m = 1)
  int threads = 0;
};

/// Largest squared-cotangent ratio over admissible candidates for one point,
/// with its argmax index. Ties break to the lowest candidate index.
std::pair<double, Eigen::Index> local_reach_geometric(const EmbeddedCloud& cloud,
                                                      Eigen::Index x_index,
                                                      double diag_exclusion);

/// Geometric route over all points; no decomposition rows.
ReachReport global_reach(const EmbeddedCloud& cloud, double diag_exclusion,
                         int threads = 0);

/// Full report: geometric sweep plus the statistical decomposition at each
/// retained argmax pair (and optional sup refinement off the grid).
ReachReport reach_report(const FieldBatch& batch, const TrigKernel& kernel,
                         const EmbeddedCloud& cloud, const ReachSettings& settings);

/// One conditional-field residual f^x_j(y)  (replicate j).
double conditional_residual(const FieldBatch& batch, const TrigKernel& kernel,
                            Eigen::Index x_index, Eigen::Index y_index,
                            Eigen::Index replicate);

/// All replicates at once: the vector f^{x,k}(y).
Eigen::VectorXd conditional_residual_vector(const FieldBatch& batch,
                                            const TrigKernel& kernel,
                                            Eigen::Index x_index,
                                            Eigen::Index y_index);

/// Directional y -> x limit of f^x_j(y); needs exact second derivatives.
/// `direction` is a coordinate tangent vector, normalized internally in the
/// induced metric.
double diagonal_residual_limit(const FieldBatch& batch, const TrigKernel& kernel,
                               Eigen::Index x_index, const Eigen::VectorXd& direction,
                               Eigen::Index replicate);

PairDecomposition reach_decomposition(const FieldBatch& batch, const TrigKernel& kernel,
                                      const EmbeddedCloud& cloud, Eigen::Index x_index,
                                      Eigen::Index y_index);

/// Definition-level oracle: walks geodesics from x along sampled unit normals
/// and returns the first radius at which some other cloud point is at least
/// as close, minimized over directions and capped at pi/2. Candidates within
/// `exclusion` (parameter distance) of x are ignored.
double brute_force_reach_oracle(const EmbeddedCloud& cloud, Eigen::Index x_index,
                                int n_directions, double r_step,
                                std::uint64_t direction_seed = 0,
                                double exclusion = 0.0);

}  // namespace gaussreach
