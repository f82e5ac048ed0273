#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gaussreach/kernel.hpp"

namespace gaussreach {

/// Exact spectral expansion of the field: every basis function is a product
/// of cos/sin factors, so sampled paths and their derivatives of any order
/// are evaluated analytically at arbitrary points.
class KlExpansion {
 public:
  explicit KlExpansion(const TrigKernel& kernel);

  int dim() const { return m_; }
  int basis_size() const { return static_cast<int>(basis_.size()); }

  /// B x P matrix of the basis differentiated `order[d]` times per dimension
  /// and evaluated at the rows of `pts` (P x m).
  Eigen::MatrixXd basis_matrix(const Eigen::MatrixXd& pts,
                               const std::array<int, 2>& order) const;

  /// k x B coefficient draw; replicate r depends only on (seed, r).
  Eigen::MatrixXd sample_coefficients(int k, std::uint64_t seed, int threads) const;

 private:
  struct BasisFn {
    std::array<int, 2> freq{1, 1};
    std::array<bool, 2> is_sin{false, false};
    double amplitude = 0.0;
  };
  int m_;
  std::vector<BasisFn> basis_;
};

enum class SampleMethod { kl, cholesky };

int d2_index(int i, int j, int m);

/// k i.i.d. field realizations on a grid with exact first (and for the
/// spectral method, second) coordinate-derivative paths.
struct FieldBatch {
  ManifoldGrid grid;
  int k = 0;
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::kl;

  Eigen::MatrixXd values;            // k x N
  std::vector<Eigen::MatrixXd> d1;   // per dimension, k x N
  std::vector<Eigen::MatrixXd> d2;   // per (i <= j) pair, k x N

  std::shared_ptr<const KlExpansion> kl;  // null for the cholesky method
  Eigen::MatrixXd kl_coeff;               // k x B

  bool has_d1() const { return !d1.empty(); }
  bool has_d2() const { return !d2.empty(); }

  /// Off-grid evaluation of the sampled paths (spectral method only).
  Eigen::MatrixXd eval_values(const Eigen::MatrixXd& pts) const;
  Eigen::MatrixXd eval_d1(const Eigen::MatrixXd& pts, int d) const;
  Eigen::MatrixXd eval_d2(const Eigen::MatrixXd& pts, int i, int j) const;
};

FieldBatch sample_kl(const TrigKernel& kernel, const ManifoldGrid& grid, int k,
                     std::uint64_t seed, int threads = 0);

/// Values + first derivatives at arbitrary points, sharing the coefficient
/// scheme of sample_kl (same seed gives the same paths).
struct PointSample {
  Eigen::MatrixXd values;           // k x P
  std::vector<Eigen::MatrixXd> d1;  // per dimension, k x P
};
PointSample sample_kl_at_points(const TrigKernel& kernel, const Eigen::MatrixXd& pts,
                                int k, std::uint64_t seed, int threads = 0);

/// Cross-validation sampler: factorizes the joint covariance of (f, grad f)
/// over the grid and transforms i.i.d. normals. d2 is absent. Throws
/// NumericalError when the factorization fails after jitter escalation.
FieldBatch sample_cholesky(const TrigKernel& kernel, const ManifoldGrid& grid,
                           int k, std::uint64_t seed, int threads = 0);

/// Binary batch dump, little-endian, magic "GRFB1". Layout is documented in
/// the README.
void write_batch(const std::string& path, const FieldBatch& batch);
FieldBatch read_batch(const std::string& path);

}  // namespace gaussreach
